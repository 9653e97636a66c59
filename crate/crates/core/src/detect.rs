//! Enrichment of motif-role overlaps against a census-constrained ensemble.
//!
//! For every pair of role orbits of the significant motif classes the
//! Jaccard index of their node sets is compared with the same index in each
//! randomized network; every single role additionally gets a
//! self-repetition index (fraction of its nodes that play it more than once).
//! All tested statistics form one Benjamini–Hochberg family.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::census::{role_assignment, scan_motifs, MotifClass, MotifScore, MotifSearchConfig, RoleAssignment, RoleOrbit};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::nullmodel::{generate_ensemble, NullModelConfig};
use crate::stats::{mean_and_sample_std, normal_upper_tail, serialize_special_f64};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// `|a ∩ b| / |a ∪ b|`, and 0 when both sets are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Fraction of participating nodes (count ≥ 1) that occur at least twice.
pub fn self_role_repetition(counts: &[u32]) -> f64 {
    let present = counts.iter().filter(|&&c| c >= 1).count();
    if present == 0 {
        return 0.0;
    }
    counts.iter().filter(|&&c| c >= 2).count() as f64 / present as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Enrichment {
    pub mean: f64,
    pub std: f64,
    #[serde(serialize_with = "serialize_special_f64")]
    pub z: f64,
    pub p: f64,
    /// Set when the ensemble has zero spread.
    pub degenerate: bool,
}

/// Z-score of `real` against `ensemble` with a one-sided normal p-value in
/// the direction of `z`.
///
/// With zero ensemble spread, `z` is 0 (and `p = 0.5`) if `real` equals the
/// ensemble value and `±∞` with `p = 0` otherwise.
pub fn enrichment(real: f64, ensemble: &[f64]) -> Result<Enrichment> {
    if ensemble.len() < 2 {
        return Err(Error::EnsembleTooSmall {
            got: ensemble.len(),
            need: 2,
        });
    }
    let (mean, std) = if ensemble.iter().all(|&v| v == ensemble[0]) {
        (ensemble[0], 0.0)
    } else {
        mean_and_sample_std(ensemble)
    };
    if std == 0.0 {
        let diff = real - mean;
        let (z, p) = if diff == 0.0 {
            (0.0, 0.5)
        } else {
            (diff.signum() * f64::INFINITY, 0.0)
        };
        return Ok(Enrichment {
            mean,
            std,
            z,
            p,
            degenerate: true,
        });
    }
    let z = (real - mean) / std;
    Ok(Enrichment {
        mean,
        std,
        z,
        p: normal_upper_tail(z.abs()),
        degenerate: false,
    })
}

/// Benjamini–Hochberg q-values in input order.
pub fn bh_correct(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]).then(i.cmp(&j)));
    let mut q = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        running = running.min(p_values[i] * m as f64 / (rank + 1) as f64);
        q[i] = running.min(1.0).max(p_values[i]);
    }
    q
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Over,
    Under,
    None,
}

impl Direction {
    pub fn call(z: f64, q: f64, alpha: f64) -> Self {
        if q < alpha && z > 0.0 {
            Direction::Over
        } else if q < alpha && z < 0.0 {
            Direction::Under
        } else {
            Direction::None
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Over => "over",
            Direction::Under => "under",
            Direction::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    /// Jaccard index between two distinct roles.
    Pair,
    /// Self-repetition index of one role.
    SelfRepetition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinationStat {
    pub kind: StatKind,
    pub role_a: RoleOrbit,
    pub role_b: RoleOrbit,
    pub j_real: f64,
    #[serde(rename = "mean")]
    pub ensemble_mean: f64,
    #[serde(rename = "std")]
    pub ensemble_std: f64,
    #[serde(serialize_with = "serialize_special_f64")]
    pub z: f64,
    pub p: f64,
    pub q: f64,
    pub direction: Direction,
    pub degenerate: bool,
    /// False when both role sets are empty in the real network; such
    /// statistics carry `p = q = 1` and are left out of the BH family.
    pub tested: bool,
}

impl CombinationStat {
    pub fn name(&self) -> String {
        match self.kind {
            StatKind::Pair => format!("{}*{}", self.role_a.label(), self.role_b.label()),
            StatKind::SelfRepetition => format!("{}*self", self.role_a.label()),
        }
    }

    pub fn involves(&self, a: &str, b: &str) -> bool {
        let (x, y) = (self.role_a.label(), self.role_b.label());
        self.kind == StatKind::Pair && ((x == a && y == b) || (x == b && y == a))
    }
}

#[derive(Debug, Clone, Copy)]
enum Probe {
    Pair(usize, usize),
    Repetition(usize),
}

fn probes(role_count: usize) -> Vec<Probe> {
    let mut out = Vec::new();
    for i in 0..role_count {
        for j in i + 1..role_count {
            out.push(Probe::Pair(i, j));
        }
    }
    out.extend((0..role_count).map(Probe::Repetition));
    out
}

fn evaluate(assignment: &RoleAssignment, probes: &[Probe]) -> Vec<f64> {
    let sets: Vec<BTreeSet<usize>> = (0..assignment.role_count()).map(|r| assignment.member_set(r)).collect();
    probes
        .iter()
        .map(|p| match *p {
            Probe::Pair(i, j) => jaccard(&sets[i], &sets[j]),
            Probe::Repetition(i) => self_role_repetition(assignment.counts(i)),
        })
        .collect()
}

/// Role-overlap statistics of `g` against a given ensemble for fixed motif
/// classes, sorted by q-value.
pub fn detect_with_ensemble(
    g: &DirectedGraph,
    ensemble: &[DirectedGraph],
    classes: &[MotifClass],
    alpha: f64,
) -> Result<Vec<CombinationStat>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if ensemble.len() < 2 {
        return Err(Error::EnsembleTooSmall {
            got: ensemble.len(),
            need: 2,
        });
    }
    let real = role_assignment(g, classes);
    let probes = probes(real.role_count());
    let real_values = evaluate(&real, &probes);
    let member_values: Vec<Vec<f64>> = ensemble
        .par_iter()
        .map(|m| evaluate(&role_assignment(m, classes), &probes))
        .collect();

    let mut stats = Vec::with_capacity(probes.len());
    let mut tested_p = Vec::new();
    for (k, probe) in probes.iter().enumerate() {
        let column: Vec<f64> = member_values.iter().map(|v| v[k]).collect();
        let e = enrichment(real_values[k], &column)?;
        let (kind, a, b, tested) = match *probe {
            Probe::Pair(i, j) => {
                let empty = real.members(i).next().is_none() && real.members(j).next().is_none();
                (StatKind::Pair, i, j, !empty)
            }
            Probe::Repetition(i) => (StatKind::SelfRepetition, i, i, real.members(i).next().is_some()),
        };
        if tested {
            tested_p.push(e.p);
        }
        stats.push(CombinationStat {
            kind,
            role_a: real.roles[a].clone(),
            role_b: real.roles[b].clone(),
            j_real: real_values[k],
            ensemble_mean: e.mean,
            ensemble_std: e.std,
            z: e.z,
            p: if tested { e.p } else { 1.0 },
            q: 1.0,
            direction: Direction::None,
            degenerate: e.degenerate || !tested,
            tested,
        });
    }
    let q = bh_correct(&tested_p);
    for (s, q) in stats.iter_mut().filter(|s| s.tested).zip(q) {
        s.q = q;
        s.direction = Direction::call(s.z, q, alpha);
    }
    let mut indexed: Vec<(usize, CombinationStat)> = stats.into_iter().enumerate().collect();
    indexed.sort_by(|(i, a), (j, b)| a.q.total_cmp(&b.q).then(i.cmp(j)));
    Ok(indexed.into_iter().map(|(_, s)| s).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectConfig {
    /// Census-constrained ensemble used for the overlap statistics.
    pub null: NullModelConfig,
    /// Degree-preserving ensemble used to pick the significant motif classes.
    pub motifs: MotifSearchConfig,
    pub alpha: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            null: NullModelConfig::default(),
            motifs: MotifSearchConfig::default(),
            alpha: DEFAULT_ALPHA,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub size: usize,
    pub converged: usize,
    pub residuals: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectReport {
    pub motif_scores: Vec<MotifScore>,
    pub motifs: Vec<MotifClass>,
    pub roles: Vec<RoleOrbit>,
    pub ensemble: EnsembleSummary,
    pub results: Vec<CombinationStat>,
    #[serde(skip)]
    pub ensemble_graphs: Vec<DirectedGraph>,
}

impl DetectReport {
    pub fn significant(&self) -> impl Iterator<Item = &CombinationStat> {
        self.results.iter().filter(|s| s.direction != Direction::None)
    }
}

/// Full pipeline: significant motif classes, census-constrained ensemble,
/// role overlaps and their enrichment. Finding no motifs is not an error;
/// the report then has no results.
pub fn detect(g: &DirectedGraph, cfg: &DetectConfig) -> Result<DetectReport> {
    if g.node_count() == 0 {
        return Err(Error::EmptyInput);
    }
    cfg.null.validate()?;
    let motif_scores = scan_motifs(g, &cfg.motifs)?;
    let motifs: Vec<MotifClass> = motif_scores
        .iter()
        .filter(|s| s.significant)
        .map(|s| s.motif_class)
        .collect();
    let roles = role_assignment(g, &motifs).roles;
    if motifs.is_empty() {
        log::info!("no significant motif classes; nothing to test");
        return Ok(DetectReport {
            motif_scores,
            motifs,
            roles,
            ensemble: EnsembleSummary {
                size: 0,
                converged: 0,
                residuals: Vec::new(),
            },
            results: Vec::new(),
            ensemble_graphs: Vec::new(),
        });
    }
    let ensemble = generate_ensemble(g, &cfg.null)?;
    let converged = ensemble.converged();
    if converged < ensemble.members.len() {
        log::warn!(
            "{} of {} ensemble members did not reach the target census",
            ensemble.members.len() - converged,
            ensemble.members.len()
        );
    }
    let graphs: Vec<DirectedGraph> = ensemble.members.iter().map(|m| m.graph.clone()).collect();
    let results = detect_with_ensemble(g, &graphs, &motifs, cfg.alpha)?;
    Ok(DetectReport {
        motif_scores,
        motifs,
        roles,
        ensemble: EnsembleSummary {
            size: graphs.len(),
            converged,
            residuals: ensemble.residuals(),
        },
        results,
        ensemble_graphs: graphs,
    })
}

/// CSV with the JSON columns, one row per statistic.
pub fn results_csv(stats: &[CombinationStat]) -> String {
    let mut out = String::from("kind,role_a,role_b,j_real,mean,std,z,p,q,direction,degenerate,tested\n");
    for s in stats {
        let kind = match s.kind {
            StatKind::Pair => "pair",
            StatKind::SelfRepetition => "self_repetition",
        };
        out.push_str(&format!(
            "{kind},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.role_a.label(),
            s.role_b.label(),
            s.j_real,
            s.ensemble_mean,
            s.ensemble_std,
            s.z,
            s.p,
            s.q,
            s.direction,
            s.degenerate,
            s.tested
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(xs: &[u32]) -> BTreeSet<u32> {
        xs.iter().copied().collect()
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&set(&[1, 2]), &set(&[1, 2])), 1.0);
        assert_eq!(jaccard(&set(&[1, 2]), &set(&[3])), 0.0);
        assert_eq!(jaccard(&set(&[1, 2, 3]), &set(&[2, 3, 4])), 0.5);
        assert_eq!(jaccard(&set(&[]), &set(&[])), 0.0);
    }

    #[test]
    fn repetition_examples() {
        assert_eq!(self_role_repetition(&[1, 1, 1]), 0.0);
        assert_eq!(self_role_repetition(&[2, 5, 3]), 1.0);
        assert_eq!(self_role_repetition(&[2, 1, 1, 3]), 0.5);
        assert_eq!(self_role_repetition(&[]), 0.0);
        assert_eq!(self_role_repetition(&[0, 0, 2]), 1.0);
    }

    #[test]
    fn enrichment_examples() {
        // mean 0.3 and sample std 0.1
        let e = enrichment(0.5, &[0.2, 0.3, 0.4]).unwrap();
        assert!((e.z - 2.0).abs() < 1e-12);
        let e = enrichment(0.3, &[0.2, 0.3, 0.4]).unwrap();
        assert_eq!(e.z, 0.0);
        assert!((e.p - 0.5).abs() < 1e-15);
        let e = enrichment(1.0 / 3.0, &[1.0 / 3.0; 100]).unwrap();
        assert_eq!((e.z, e.degenerate), (0.0, true));
        let e = enrichment(0.4, &[0.1; 5]).unwrap();
        assert_eq!((e.z, e.p), (f64::INFINITY, 0.0));
        assert!(matches!(enrichment(0.1, &[0.1]), Err(Error::EnsembleTooSmall { .. })));
    }

    #[test]
    fn bh_examples() {
        let q = bh_correct(&[0.01, 0.02, 0.04]);
        for (a, b) in q.iter().zip([0.03, 0.03, 0.04]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(bh_correct(&[0.2]), vec![0.2]);
        assert_eq!(bh_correct(&[1.0, 1.0]), vec![1.0, 1.0]);
        assert!(bh_correct(&[]).is_empty());
    }

    #[test]
    fn copies_of_the_graph_make_no_calls() {
        let g = DirectedGraph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 3), (1, 1), (3, 4)]);
        let ensemble = vec![g.clone(); 4];
        let stats = detect_with_ensemble(&g, &ensemble, &[MotifClass::ffl(), MotifClass::SELF_LOOP], 0.05).unwrap();
        // 4 roles: 6 pairs + 4 repetitions
        assert_eq!(stats.len(), 10);
        for s in &stats {
            assert_eq!(s.z, 0.0);
            assert!(s.degenerate);
            assert_eq!(s.direction, Direction::None);
        }
    }

    #[test]
    fn untested_pairs_stay_out_of_the_family() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let other = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        let stats = detect_with_ensemble(&g, &[other.clone(), other], &[MotifClass::ffl(), MotifClass::SELF_LOOP], 0.05).unwrap();
        let sl = stats.iter().find(|s| s.kind == StatKind::SelfRepetition && s.role_a.motif_class.is_self_loop()).unwrap();
        assert!(!sl.tested);
        assert_eq!((sl.p, sl.q), (1.0, 1.0));
        let tested = stats.iter().filter(|s| s.tested).count();
        // every pair touches a non-empty FFL role; only the SL repetition is untested
        assert_eq!(tested, 6 + 3);
    }

    /// Direct formula application used as an oracle for direction calls.
    fn brute_calls(real: &[f64], ensembles: &[Vec<f64>], alpha: f64) -> Vec<Direction> {
        let zs: Vec<f64> = real
            .iter()
            .zip(ensembles)
            .map(|(&r, e)| {
                let m = e.iter().sum::<f64>() / e.len() as f64;
                let s = (e.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (e.len() - 1) as f64).sqrt();
                (r - m) / s
            })
            .collect();
        let ps: Vec<f64> = zs
            .iter()
            .map(|z| 0.5 * statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2))
            .collect();
        let m = ps.len() as f64;
        zs.iter()
            .enumerate()
            .map(|(i, &z)| {
                // q_i = min over p_j ≥ p_i of p_j · m / rank_j
                let q = ps
                    .iter()
                    .filter(|&&pj| pj >= ps[i])
                    .map(|&pj| pj * m / ps.iter().filter(|&&pk| pk <= pj).count() as f64)
                    .fold(1.0f64, f64::min);
                if q < alpha {
                    if z > 0.0 {
                        Direction::Over
                    } else {
                        Direction::Under
                    }
                } else {
                    Direction::None
                }
            })
            .collect()
    }

    proptest! {
        #[test]
        fn jaccard_symmetric_and_bounded(a in proptest::collection::btree_set(0u32..20, 0..10),
                                         b in proptest::collection::btree_set(0u32..20, 0..10)) {
            let j = jaccard(&a, &b);
            prop_assert_eq!(j, jaccard(&b, &a));
            prop_assert!((0.0..=1.0).contains(&j));
            if !a.is_empty() || !b.is_empty() {
                prop_assert_eq!(j == 1.0, a == b);
            }
        }

        #[test]
        fn bh_is_permutation_equivariant(ps in proptest::collection::vec(0.0f64..=1.0, 1..30), seed in any::<u64>()) {
            let q = bh_correct(&ps);
            for (p, q) in ps.iter().zip(&q) {
                prop_assert!(q >= p);
                prop_assert!(*q <= 1.0);
            }
            let mut perm: Vec<usize> = (0..ps.len()).collect();
            let mut s = seed;
            for i in (1..perm.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let permuted: Vec<f64> = perm.iter().map(|&i| ps[i]).collect();
            let qp = bh_correct(&permuted);
            for (k, &i) in perm.iter().enumerate() {
                prop_assert!((qp[k] - q[i]).abs() < 1e-12);
            }
        }

        #[test]
        fn direction_calls_match_direct_formula(
            rows in proptest::collection::vec((0.0f64..1.0, proptest::collection::vec(0.0f64..1.0, 3..12)), 1..12),
            alpha in 0.01f64..0.2,
        ) {
            let real: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let ens: Vec<Vec<f64>> = rows.iter().map(|r| r.1.clone()).collect();
            prop_assume!(ens.iter().all(|e| e.iter().any(|&x| x != e[0])));
            let es: Vec<Enrichment> = real.iter().zip(&ens).map(|(&r, e)| enrichment(r, e).unwrap()).collect();
            let q = bh_correct(&es.iter().map(|e| e.p).collect::<Vec<_>>());
            let got: Vec<Direction> = es.iter().zip(&q).map(|(e, &q)| Direction::call(e.z, q, alpha)).collect();
            let want = brute_calls(&real, &ens, alpha);
            for (i, (g, w)) in got.iter().zip(&want).enumerate() {
                // Skip calls sitting within rounding of the threshold.
                let margin = (q[i] - alpha).abs();
                if margin > 1e-9 {
                    prop_assert_eq!(g, w);
                }
            }
        }
    }
}
