//! Triad census, motif significance and motif-role assignment.

mod classes;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

pub use classes::{
    canonical_class, canonical_permutation, class_index, code_from_edges, code_is_connected,
    edges_of_code, permute_code, role_orbits, MotifClass, RoleOrbit, PAIRS, PERMUTATIONS,
    TRIAD_CLASS_COUNT,
};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, DirectedGraph};
use crate::stats::{mean_and_sample_std, serialize_special_f64};

pub const DEFAULT_MIN_MOTIF_COUNT: u64 = 4;
pub const DEFAULT_MIN_MOTIF_EXCESS: f64 = 0.1;

/// Default motif significance threshold in ensemble standard deviations.
pub const DEFAULT_MOTIF_Z: f64 = 2.0;

/// Triad code of the ordered node triple `(a, b, c)`.
#[inline]
pub fn triad_code<G: Adjacency + ?Sized>(g: &G, a: usize, b: usize, c: usize) -> u8 {
    let nodes = [a, b, c];
    let mut code = 0u8;
    for (bit, &(i, j)) in PAIRS.iter().enumerate() {
        if g.has_edge(nodes[i], nodes[j]) {
            code |= 1 << bit;
        }
    }
    code
}

/// Counts of induced subgraphs: all 16 triad classes (indexed by
/// [`class_index`]) plus the number of self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriadCensus {
    pub counts: [u64; TRIAD_CLASS_COUNT],
    pub self_loops: u64,
}

impl TriadCensus {
    pub fn count(&self, class: MotifClass) -> u64 {
        if class.is_self_loop() {
            self.self_loops
        } else {
            self.counts[class.triad_index()]
        }
    }

    /// Sum over the 13 connected classes.
    pub fn connected_total(&self) -> u64 {
        MotifClass::connected_triads().iter().map(|&c| self.count(c)).sum()
    }

    /// `Σ_class |self − other|` over the triad classes and the self-loop count.
    pub fn l1_distance(&self, other: &TriadCensus) -> u64 {
        self.counts
            .iter()
            .zip(other.counts.iter())
            .map(|(a, b)| a.abs_diff(*b))
            .sum::<u64>()
            + self.self_loops.abs_diff(other.self_loops)
    }
}

fn choose3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) / 2 * (n - 2) / 3
    }
}

/// Visits every weakly connected node triple exactly once (Batagelj–Mrvar
/// ordering), passing the ordered triple and its triad code.
pub(crate) fn for_each_connected_triad<G, F>(g: &G, und: &[Vec<usize>], range: std::ops::Range<usize>, mut visit: F)
where
    G: Adjacency + ?Sized,
    F: FnMut(usize, usize, usize, u8),
{
    let mut scratch = Vec::new();
    for v in range {
        for &u in &und[v] {
            if u <= v {
                continue;
            }
            scratch.clear();
            union_excluding(&und[v], &und[u], v, u, &mut scratch);
            for &w in &scratch {
                if u < w || (v < w && w < u && und[v].binary_search(&w).is_err()) {
                    visit(v, u, w, triad_code(g, v, u, w));
                }
            }
        }
    }
}

fn union_excluding(a: &[usize], b: &[usize], x: usize, y: usize, out: &mut Vec<usize>) {
    let (mut i, mut j) = (0, 0);
    loop {
        let next = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) if p == q => {
                i += 1;
                j += 1;
                p
            }
            (Some(&p), Some(&q)) if p < q => {
                i += 1;
                p
            }
            (_, Some(&q)) => {
                j += 1;
                q
            }
            (Some(&p), None) => {
                i += 1;
                p
            }
            (None, None) => break,
        };
        if next != x && next != y {
            out.push(next);
        }
    }
}

fn undirected_lists<G: Adjacency + ?Sized>(g: &G) -> Vec<Vec<usize>> {
    (0..g.node_count()).map(|u| g.undirected_neighbors(u)).collect()
}

/// Induced-subgraph census over all node triples plus self-loop count.
///
/// Connected triads are enumerated from edges; disconnected classes are
/// derived arithmetically, so the cost is independent of `C(N, 3)`.
pub fn triad_census<G: Adjacency + Sync + ?Sized>(g: &G) -> TriadCensus {
    let n = g.node_count();
    let und = undirected_lists(g);
    let chunk = 64usize;
    let ranges: Vec<_> = (0..n).step_by(chunk).map(|s| s..(s + chunk).min(n)).collect();
    let mut counts = ranges
        .into_par_iter()
        .map(|range| {
            let mut local = [0u64; TRIAD_CLASS_COUNT];
            let mut scratch = Vec::new();
            for_each_connected_triad(g, &und, range.clone(), |_, _, _, code| {
                local[class_index(code)] += 1;
            });
            // Dyads with an isolated third node.
            for v in range {
                for &u in &und[v] {
                    if u <= v {
                        continue;
                    }
                    scratch.clear();
                    union_excluding(&und[v], &und[u], v, u, &mut scratch);
                    let isolated = (n - 2 - scratch.len()) as u64;
                    let code = if g.has_edge(v, u) && g.has_edge(u, v) {
                        0b0000_0101
                    } else {
                        0b0000_0001
                    };
                    local[class_index(code)] += isolated;
                }
            }
            local
        })
        .reduce(
            || [0u64; TRIAD_CLASS_COUNT],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let empty = class_index(0);
    let assigned: u64 = counts.iter().sum();
    counts[empty] = choose3(n as u64) - assigned;
    TriadCensus {
        counts,
        self_loops: (0..n).filter(|&u| g.has_self_loop(u)).count() as u64,
    }
}

/// Significance of one motif class against an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotifScore {
    #[serde(rename = "class")]
    pub motif_class: MotifClass,
    pub class_code: u8,
    pub size: usize,
    pub count: u64,
    pub ensemble_mean: f64,
    pub ensemble_std: f64,
    #[serde(serialize_with = "serialize_special_f64")]
    pub z: f64,
    pub significant: bool,
}

/// Scores for the 13 connected triad classes and the self-loop class.
///
/// Zero-variance classes get `z = 0` when the real count equals the ensemble
/// value and `±∞` otherwise; `+∞` counts as significant.
pub fn motif_scores(real: &TriadCensus, ensemble: &[TriadCensus], z_threshold: f64) -> Result<Vec<MotifScore>> {
    if ensemble.is_empty() {
        return Err(Error::EnsembleTooSmall { got: 0, need: 1 });
    }
    let mut classes = MotifClass::connected_triads();
    classes.push(MotifClass::SELF_LOOP);
    Ok(classes
        .into_iter()
        .map(|class| {
            let count = real.count(class);
            let values: Vec<f64> = ensemble.iter().map(|c| c.count(class) as f64).collect();
            let (mean, std) = mean_and_sample_std(&values);
            let diff = count as f64 - mean;
            let z = if std > 0.0 {
                diff / std
            } else if diff == 0.0 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            };
            MotifScore {
                motif_class: class,
                class_code: class.canonical_code(),
                size: class.size(),
                count,
                ensemble_mean: mean,
                ensemble_std: std,
                z,
                significant: z > z_threshold,
            }
        })
        .collect())
}

/// Classes whose real count exceeds the ensemble mean by more than
/// `z_threshold` ensemble standard deviations.
pub fn find_motifs(g: &DirectedGraph, ensemble: &[DirectedGraph], z_threshold: f64) -> Result<Vec<(MotifClass, f64)>> {
    if ensemble.is_empty() {
        return Err(Error::EnsembleTooSmall { got: 0, need: 1 });
    }
    if let Some(bad) = ensemble
        .iter()
        .find(|m| m.node_count() != g.node_count() || m.edge_count() != g.edge_count())
    {
        return Err(Error::InvalidArgument(format!(
            "ensemble member has N={}, E={} but the graph has N={}, E={}",
            bad.node_count(),
            bad.edge_count(),
            g.node_count(),
            g.edge_count()
        )));
    }
    let real = triad_census(g);
    let censuses: Vec<TriadCensus> = ensemble.iter().map(triad_census).collect();
    Ok(motif_scores(&real, &censuses, z_threshold)?
        .into_iter()
        .filter(|s| s.significant)
        .map(|s| (s.motif_class, s.z))
        .collect())
}

/// Settings for scoring motifs against degree-preserving rewirings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotifSearchConfig {
    pub ensemble_size: usize,
    pub swap_multiplier: usize,
    pub z_threshold: f64,
    /// Fewest real occurrences a motif may have.
    pub min_count: u64,
    /// Required excess of the real count over the ensemble mean, as a
    /// fraction of that mean.
    pub min_excess: f64,
    pub seed: u64,
}

impl Default for MotifSearchConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 100,
            swap_multiplier: 100,
            z_threshold: DEFAULT_MOTIF_Z,
            min_count: DEFAULT_MIN_MOTIF_COUNT,
            min_excess: DEFAULT_MIN_MOTIF_EXCESS,
            seed: 0,
        }
    }
}

/// Scores every class against an ensemble of rewirings that also move
/// self-loops, so that the self-loop class can itself be a motif. A class is
/// significant when its Z-score passes the threshold, it occurs at least
/// `min_count` times and exceeds the ensemble mean by `min_excess · mean`.
pub fn scan_motifs(g: &DirectedGraph, cfg: &MotifSearchConfig) -> Result<Vec<MotifScore>> {
    if cfg.ensemble_size < 2 {
        return Err(Error::EnsembleTooSmall {
            got: cfg.ensemble_size,
            need: 2,
        });
    }
    let ensemble = crate::nullmodel::degree_preserving_ensemble(
        g,
        cfg.ensemble_size,
        cfg.swap_multiplier,
        crate::nullmodel::LoopPolicy::Mobile,
        cfg.seed,
    );
    let censuses: Vec<TriadCensus> = ensemble.iter().map(triad_census).collect();
    let mut scores = motif_scores(&triad_census(g), &censuses, cfg.z_threshold)?;
    for s in &mut scores {
        s.significant &= s.count >= cfg.min_count && s.count as f64 - s.ensemble_mean > cfg.min_excess * s.ensemble_mean;
    }
    Ok(scores)
}

/// Nodes grouped by the motif roles they occupy, with occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleAssignment {
    pub roles: Vec<RoleOrbit>,
    /// `counts[r][u]`: occurrences in which node `u` plays role `r`.
    counts: Vec<Vec<u32>>,
}

impl RoleAssignment {
    pub fn role_count(&self) -> usize {
        self.roles.len()
    }

    pub fn count(&self, role: usize, node: usize) -> u32 {
        self.counts[role][node]
    }

    pub fn counts(&self, role: usize) -> &[u32] {
        &self.counts[role]
    }

    pub fn members(&self, role: usize) -> impl Iterator<Item = usize> + '_ {
        self.counts[role]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(u, _)| u)
    }

    pub fn member_set(&self, role: usize) -> BTreeSet<usize> {
        self.members(role).collect()
    }

    /// `N_m`: nodes participating in any of the assigned motif classes.
    pub fn participating_nodes(&self) -> BTreeSet<usize> {
        (0..self.roles.len()).flat_map(|r| self.members(r)).collect()
    }

    /// Role sets keyed by node name, for reporting.
    pub fn named_sets(&self, g: &DirectedGraph) -> BTreeMap<String, BTreeMap<String, u32>> {
        self.roles
            .iter()
            .enumerate()
            .map(|(r, role)| {
                let members = self
                    .members(r)
                    .map(|u| (g.name(u).to_string(), self.counts[r][u]))
                    .collect();
                (role.label(), members)
            })
            .collect()
    }
}

/// Assigns every node of every induced occurrence of `classes` to the role
/// orbit of its position. Duplicate classes are ignored.
pub fn role_assignment<G: Adjacency + ?Sized>(g: &G, classes: &[MotifClass]) -> RoleAssignment {
    let n = g.node_count();
    let mut unique: Vec<MotifClass> = Vec::new();
    for c in classes {
        if !unique.contains(c) {
            unique.push(*c);
        }
    }
    let mut roles = Vec::new();
    // class index -> role index per canonical position
    let mut triad_roles: [Option<[usize; 3]>; TRIAD_CLASS_COUNT] = [None; TRIAD_CLASS_COUNT];
    let mut loop_role = None;
    for class in &unique {
        let base = roles.len();
        let orbits = role_orbits(*class);
        if class.is_self_loop() {
            loop_role = Some(base);
        } else {
            let mut by_position = [0usize; 3];
            for o in &orbits {
                for &p in &o.member_positions {
                    by_position[p] = base + o.orbit_index;
                }
            }
            triad_roles[class.triad_index()] = Some(by_position);
        }
        roles.extend(orbits);
    }
    let mut counts = vec![vec![0u32; n]; roles.len()];
    if let Some(r) = loop_role {
        for (u, c) in counts[r].iter_mut().enumerate() {
            if g.has_self_loop(u) {
                *c += 1;
            }
        }
    }
    if triad_roles.iter().any(Option::is_some) {
        let und = undirected_lists(g);
        for_each_connected_triad(g, &und, 0..n, |a, b, c, code| {
            if let Some(by_position) = triad_roles[class_index(code)] {
                let perm = canonical_permutation(code);
                for (i, node) in [a, b, c].into_iter().enumerate() {
                    counts[by_position[perm[i]]][node] += 1;
                }
            }
        });
    }
    RoleAssignment { roles, counts }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive census over all `C(n, 3)` triples.
    fn brute_census(g: &DirectedGraph) -> TriadCensus {
        let n = g.node_count();
        let mut counts = [0u64; TRIAD_CLASS_COUNT];
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    counts[class_index(triad_code(g, a, b, c))] += 1;
                }
            }
        }
        TriadCensus {
            counts,
            self_loops: g.self_loop_count() as u64,
        }
    }

    fn class(name: &str) -> MotifClass {
        name.parse().unwrap()
    }

    #[test]
    fn three_cycle_census() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        let c = triad_census(&g);
        assert_eq!(c.count(class("LOOP3")), 1);
        assert_eq!(c.connected_total(), 1);
    }

    #[test]
    fn single_ffl_census() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let c = triad_census(&g);
        assert_eq!(c.count(MotifClass::ffl()), 1);
        assert_eq!(c.connected_total(), 1);
    }

    #[test]
    fn census_matches_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.random_range(3..15);
            let p: f64 = rng.random_range(0.05..0.6);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            let g = DirectedGraph::from_edges(n, edges);
            assert_eq!(triad_census(&g), brute_census(&g));
        }
    }

    #[test]
    fn disconnected_graph_with_few_nodes() {
        let g = DirectedGraph::from_edges(2, [(0, 1)]);
        let c = triad_census(&g);
        assert_eq!(c.counts.iter().sum::<u64>(), 0);
    }

    #[test]
    fn identical_ensemble_has_no_motifs() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 3)]);
        let ensemble = vec![g.clone(), g.clone(), g.clone()];
        assert!(find_motifs(&g, &ensemble, DEFAULT_MOTIF_Z).unwrap().is_empty());
        let real = triad_census(&g);
        let scores = motif_scores(&real, &[real.clone(), real.clone()], 2.0).unwrap();
        assert!(scores.iter().all(|s| s.z == 0.0 && !s.significant));
    }

    #[test]
    fn find_motifs_rejects_empty_and_mismatched_ensembles() {
        let g = DirectedGraph::from_edges(3, [(0, 1)]);
        assert!(matches!(
            find_motifs(&g, &[], 2.0),
            Err(Error::EnsembleTooSmall { .. })
        ));
        let other = DirectedGraph::from_edges(3, [(0, 1), (1, 2)]);
        assert!(find_motifs(&g, &[other], 2.0).is_err());
    }

    #[test]
    fn zero_variance_excess_is_infinite() {
        let real = TriadCensus {
            counts: [0; 16],
            self_loops: 5,
        };
        let base = TriadCensus {
            counts: [0; 16],
            self_loops: 0,
        };
        let scores = motif_scores(&real, &[base.clone(), base], 2.0).unwrap();
        let sl = scores.iter().find(|s| s.motif_class.is_self_loop()).unwrap();
        assert!(sl.z.is_infinite() && sl.significant);
    }

    #[test]
    fn single_ffl_roles() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let ra = role_assignment(&g, &[MotifClass::ffl()]);
        assert_eq!(ra.role_count(), 3);
        for u in 0..3 {
            let roles: Vec<_> = (0..3).filter(|&r| ra.count(r, u) > 0).collect();
            assert_eq!(roles.len(), 1);
        }
        let input = ra.roles.iter().position(|r| r.role_name() == "input").unwrap();
        assert_eq!(ra.member_set(input), BTreeSet::from([0]));
    }

    #[test]
    fn shared_intermediate_counts_twice() {
        // FFLs 0->1->2, 0->2 and 3->1->4, 3->4 share intermediate node 1.
        let g = DirectedGraph::from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 1), (1, 4), (3, 4)]);
        let ra = role_assignment(&g, &[MotifClass::ffl()]);
        let mid = ra.roles.iter().position(|r| r.role_name() == "intermediate").unwrap();
        assert_eq!(ra.count(mid, 1), 2);
        assert_eq!(ra.member_set(mid), BTreeSet::from([1]));
    }

    #[test]
    fn self_loop_roles() {
        let g = DirectedGraph::from_edges(3, [(0, 0), (1, 2), (2, 2)]);
        let ra = role_assignment(&g, &[MotifClass::SELF_LOOP]);
        assert_eq!(ra.role_count(), 1);
        assert_eq!(ra.member_set(0), BTreeSet::from([0, 2]));
        assert_eq!(ra.participating_nodes(), BTreeSet::from([0, 2]));
    }
}
