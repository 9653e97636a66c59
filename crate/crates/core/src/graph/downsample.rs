//! Random-walk downsampling of large networks.
//!
//! The walk builds an entry list `s` of length `sz + 1`. Each new entry is a
//! neighbor of the previous entry with probability `walk_probability`, and a
//! neighbor of the anchor `s_0` otherwise. After a third and after two thirds
//! of the list the number of distinct entries is checked; a walk that stays
//! too local gets a fresh anchor. Neighborhoods are undirected (in ∪ out), and
//! a self-loop makes a node its own neighbor.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Adjacency, DirectedGraph};
use crate::census::{scan_motifs, MotifClass, MotifSearchConfig};
use crate::error::{Error, Result};
use crate::stats::ks_distance;

/// Fresh anchor draws allowed before giving up on isolated start nodes.
pub const ANCHOR_DRAW_BUDGET: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DownsampleConfig {
    /// Target length of the entry list (with repeats).
    pub sz: usize,
    pub walk_probability: f64,
    pub seed: u64,
}

impl DownsampleConfig {
    pub fn new(sz: usize, seed: u64) -> Self {
        Self {
            sz,
            walk_probability: 0.85,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sz < 3 {
            return Err(Error::InvalidArgument(format!("sample size must be at least 3, got {}", self.sz)));
        }
        if !(self.walk_probability > 0.0 && self.walk_probability < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "walk probability must lie in (0, 1), got {}",
                self.walk_probability
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DownsampleResult {
    pub graph: DirectedGraph,
    /// Distinct sampled node names in order of first visit.
    pub sample: Vec<String>,
    pub anchor_draws: usize,
    pub warnings: Vec<String>,
}

fn neighborhoods(g: &DirectedGraph) -> Vec<Vec<usize>> {
    (0..g.node_count())
        .map(|u| {
            let mut nb = g.undirected_neighbors(u);
            if g.has_self_loop(u) {
                let pos = nb.binary_search(&u).unwrap_err();
                nb.insert(pos, u);
            }
            nb
        })
        .collect()
}

fn reachable_size(nb: &[Vec<usize>], start: usize) -> usize {
    let mut seen = vec![false; nb.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut count = 0;
    while let Some(u) = queue.pop_front() {
        count += 1;
        for &v in &nb[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    count
}

pub fn downsample(g: &DirectedGraph, cfg: &DownsampleConfig) -> Result<DownsampleResult> {
    cfg.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let nb = neighborhoods(g);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draws = 0;
    let mut draw_anchor = |rng: &mut ChaCha8Rng| -> Result<usize> {
        loop {
            if draws >= ANCHOR_DRAW_BUDGET {
                return Err(Error::IsolatedStart(draws));
            }
            draws += 1;
            let u = rng.random_range(0..n);
            if !nb[u].is_empty() {
                return Ok(u);
            }
        }
    };
    let pick = |rng: &mut ChaCha8Rng, u: usize| nb[u][rng.random_range(0..nb[u].len())];

    let mut anchor = draw_anchor(&mut rng)?;
    let first_anchor = anchor;
    let third = cfg.sz / 3;
    let mut entries = Vec::with_capacity(cfg.sz + 1);
    let mut seen = HashSet::new();
    let mut order = Vec::new();
    let mut push = |u: usize, entries: &mut Vec<usize>, order: &mut Vec<usize>| {
        entries.push(u);
        if seen.insert(u) {
            order.push(u);
        }
    };
    push(anchor, &mut entries, &mut order);
    let s1 = pick(&mut rng, anchor);
    push(s1, &mut entries, &mut order);
    for i in 2..=cfg.sz {
        if i == third + 1 && (order.len() as f64) < third as f64 / 2.0 {
            anchor = draw_anchor(&mut rng)?;
        }
        if i == 2 * third + 1 && order.len() < third {
            anchor = draw_anchor(&mut rng)?;
        }
        let prev = entries[i - 1];
        let next = if rng.random::<f64>() < cfg.walk_probability {
            pick(&mut rng, prev)
        } else {
            pick(&mut rng, anchor)
        };
        push(next, &mut entries, &mut order);
    }

    let mut warnings = Vec::new();
    let reachable = reachable_size(&nb, first_anchor);
    if cfg.sz > reachable {
        warnings.push(format!(
            "sample size {} exceeds the {} nodes reachable from the start node",
            cfg.sz, reachable
        ));
    }
    if order.len() < third.min(reachable) {
        warnings.push(format!(
            "only {} distinct nodes sampled, below the target of {}",
            order.len(),
            third.min(reachable)
        ));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(DownsampleResult {
        graph: g.induced_subgraph(&order),
        sample: order.iter().map(|&u| g.name(u).to_string()).collect(),
        anchor_draws: draws,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[derive(Default)]
pub struct ValidationConfig {
    pub motifs: MotifSearchConfig,
}


#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// KS distance between total-degree distributions.
    pub ks_distance: f64,
    pub full_motifs: Vec<MotifClass>,
    pub sample_motifs: Vec<MotifClass>,
    pub same_motifs: bool,
}

/// Compares a downsampled graph against the full graph: degree distributions
/// by KS distance and significant motif classes by exact set equality.
pub fn validate_downsample(g: &DirectedGraph, gd: &DirectedGraph, cfg: &ValidationConfig) -> Result<ValidationReport> {
    if gd.node_count() == 0 {
        return Err(Error::NotInducedSubgraph("the sample has no nodes".into()));
    }
    let mut mapping = Vec::with_capacity(gd.node_count());
    for name in gd.names() {
        let u = g
            .index_of(name)
            .ok_or_else(|| Error::NotInducedSubgraph(format!("node `{name}` is not in the full graph")))?;
        mapping.push(u);
    }
    let induced = g.induced_subgraph(&mapping);
    for (u, name) in gd.names().iter().enumerate() {
        let iu = induced.index_of(name).expect("same node set");
        let mut want: Vec<&str> = induced.out_neighbors(iu).iter().map(|&v| induced.name(v)).collect();
        let mut got: Vec<&str> = gd.out_neighbors(u).iter().map(|&v| gd.name(v)).collect();
        want.sort_unstable();
        got.sort_unstable();
        if want != got || induced.has_self_loop(iu) != gd.has_self_loop(u) {
            return Err(Error::NotInducedSubgraph(format!("edges at node `{name}` differ from the full graph")));
        }
    }
    let degrees = |h: &DirectedGraph| -> Vec<f64> {
        (0..h.node_count())
            .map(|u| (h.in_degree(u) + h.out_degree(u)) as f64)
            .collect()
    };
    let ks = ks_distance(&degrees(g), &degrees(gd));
    let significant = |h: &DirectedGraph| -> Result<Vec<MotifClass>> {
        Ok(scan_motifs(h, &cfg.motifs)?
            .into_iter()
            .filter(|s| s.significant)
            .map(|s| s.motif_class)
            .collect())
    };
    let full_motifs = significant(g)?;
    let sample_motifs = if gd == g { full_motifs.clone() } else { significant(gd)? };
    Ok(ValidationReport {
        ks_distance: ks,
        same_motifs: full_motifs == sample_motifs,
        full_motifs,
        sample_motifs,
    })
}
