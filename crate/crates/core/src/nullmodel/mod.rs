//! Random ensembles preserving degrees and the ≤3-node subgraph census.
//!
//! Members are produced in two phases: double-edge swaps mix the graph while
//! holding every node's in/out degree fixed, then Metropolis annealing over
//! the same swaps drives the triad census back to the real network's. The
//! annealing objective is the L1 distance between censuses; its final value
//! is reported per member as the residual.

mod swap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub(crate) use swap::SwapGraph;

use crate::census::{triad_census, TriadCensus, TRIAD_CLASS_COUNT};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Metropolis annealing schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnealConfig {
    pub initial_temperature: f64,
    /// Temperature multiplier applied after every proposal.
    pub cooling_factor: f64,
    /// Proposal budget.
    pub max_iterations: u64,
    /// Stop as soon as the residual is at most this value.
    pub target_residual: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            initial_temperature: 0.03,
            cooling_factor: 0.9999,
            max_iterations: 2_000_000,
            target_residual: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullModelConfig {
    pub ensemble_size: usize,
    /// Swap attempts per edge in the mixing phase.
    pub swap_multiplier: usize,
    pub anneal: AnnealConfig,
    pub seed: u64,
}

impl Default for NullModelConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 100,
            swap_multiplier: 100,
            anneal: AnnealConfig::default(),
            seed: 0,
        }
    }
}

impl NullModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ensemble_size < 2 {
            return Err(Error::EnsembleTooSmall {
                got: self.ensemble_size,
                need: 2,
            });
        }
        let a = &self.anneal;
        if !(a.cooling_factor > 0.0 && a.cooling_factor < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cooling factor must lie in (0, 1), got {}",
                a.cooling_factor
            )));
        }
        if a.initial_temperature.is_nan() || a.initial_temperature <= 0.0 {
            return Err(Error::InvalidArgument("initial temperature must be positive".into()));
        }
        Ok(())
    }
}

/// How self-loops take part in degree-preserving swaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopPolicy {
    /// Self-loops stay on their nodes; swaps never create new ones.
    Frozen,
    /// Self-loops are ordinary swappable edges and may move or appear.
    Mobile,
}

/// Mixes `g` with `swap_multiplier · E` double-edge swap attempts
/// `(a→b, c→d) ⇒ (a→d, c→b)`, keeping self-loops frozen.
pub fn rewire_degree_preserving<R: Rng>(g: &DirectedGraph, cfg: &NullModelConfig, rng: &mut R) -> DirectedGraph {
    rewire_with_policy(g, cfg.swap_multiplier, LoopPolicy::Frozen, rng)
}

pub fn rewire_with_policy<R: Rng>(
    g: &DirectedGraph,
    swap_multiplier: usize,
    policy: LoopPolicy,
    rng: &mut R,
) -> DirectedGraph {
    let mut sg = SwapGraph::from_graph(g, policy);
    sg.mix(swap_multiplier.saturating_mul(g.edge_count()), rng);
    sg.to_graph(g)
}

/// Result of annealing one graph towards a target census.
#[derive(Debug, Clone)]
pub struct AnnealOutcome {
    pub graph: DirectedGraph,
    pub residual: u64,
    pub iterations: u64,
    pub accepted: u64,
    /// Best-so-far objective after each improvement, starting with the initial value.
    pub best_trace: Vec<u64>,
}

fn census_objective(current: &[i64; TRIAD_CLASS_COUNT], target: &TriadCensus) -> u64 {
    current
        .iter()
        .zip(target.counts.iter())
        .map(|(&c, &t)| c.abs_diff(t as i64))
        .sum()
}

fn census_energy(current: &[i64; TRIAD_CLASS_COUNT], target: &TriadCensus) -> f64 {
    current
        .iter()
        .zip(target.counts.iter())
        .map(|(&c, &t)| {
            let diff = c.abs_diff(t as i64);
            if diff == 0 {
                0.0
            } else {
                diff as f64 / (c + t as i64) as f64
            }
        })
        .sum()
}

/// Metropolis annealing over frozen-loop double-edge swaps towards `target`.
///
/// The reported residual is `Σ_class |census(current) − target(class)|` and
/// the returned graph is the one with the lowest residual seen. Acceptance
/// uses the per-class relative error `Σ |c − t| / (c + t)`, which is zero
/// exactly when the residual is.
pub fn anneal_to_census<R: Rng>(
    g_random: &DirectedGraph,
    target: &TriadCensus,
    cfg: &NullModelConfig,
    rng: &mut R,
) -> AnnealOutcome {
    let anneal = &cfg.anneal;
    let mut sg = SwapGraph::from_graph(g_random, LoopPolicy::Frozen);
    let start = triad_census(&sg);
    let mut current = [0i64; TRIAD_CLASS_COUNT];
    for (c, s) in current.iter_mut().zip(start.counts.iter()) {
        *c = *s as i64;
    }
    let mut residual = census_objective(&current, target);
    let mut energy = census_energy(&current, target);
    let mut best_energy = residual;
    let mut best_edges = sg.edge_snapshot();
    let mut best_trace = vec![residual];
    let mut temperature = anneal.initial_temperature;
    let floor = anneal.initial_temperature * 1e-3;
    let mut iterations = 0;
    let mut accepted = 0;
    let mut delta = [0i64; TRIAD_CLASS_COUNT];
    let edge_total = sg.swappable_edges();
    while iterations < anneal.max_iterations && best_energy > anneal.target_residual && edge_total >= 2 {
        iterations += 1;
        temperature *= anneal.cooling_factor;
        if temperature < floor {
            temperature = anneal.initial_temperature;
        }
        let Some(swap) = sg.propose(rng) else { continue };
        sg.apply_with_census_delta(swap, &mut delta);
        let mut next = current;
        for (n, d) in next.iter_mut().zip(delta.iter()) {
            *n += d;
        }
        let next_energy = census_energy(&next, target);
        let accept = next_energy <= energy || rng.random::<f64>() < (-(next_energy - energy) / temperature).exp();
        if accept {
            accepted += 1;
            current = next;
            energy = next_energy;
            residual = census_objective(&current, target);
            if residual < best_energy {
                best_energy = residual;
                best_edges = sg.edge_snapshot();
                best_trace.push(best_energy);
            }
        } else {
            sg.undo(swap);
        }
    }
    sg.restore(&best_edges);
    AnnealOutcome {
        graph: sg.to_graph(g_random),
        residual: best_energy,
        iterations,
        accepted,
        best_trace,
    }
}

/// One randomized network and how closely it matches the real census.
#[derive(Debug, Clone)]
pub struct EnsembleMember {
    pub graph: DirectedGraph,
    pub residual: u64,
    pub iterations: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Default)]
pub struct Ensemble {
    pub members: Vec<EnsembleMember>,
}

impl Ensemble {
    pub fn graphs(&self) -> impl Iterator<Item = &DirectedGraph> {
        self.members.iter().map(|m| &m.graph)
    }

    pub fn residuals(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.residual).collect()
    }

    pub fn converged(&self) -> usize {
        self.members.iter().filter(|m| m.residual == 0).count()
    }
}

/// Census-constrained ensemble. Member `i` is seeded with `seed + i`, so
/// results do not depend on how many workers run.
pub fn generate_ensemble(g: &DirectedGraph, cfg: &NullModelConfig) -> Result<Ensemble> {
    cfg.validate()?;
    let target = triad_census(g);
    let members = (0..cfg.ensemble_size)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mixed = rewire_degree_preserving(g, cfg, &mut rng);
            let out = anneal_to_census(&mixed, &target, cfg, &mut rng);
            log::debug!("ensemble member {i}: residual {} after {} proposals", out.residual, out.iterations);
            EnsembleMember {
                graph: out.graph,
                residual: out.residual,
                iterations: out.iterations,
                seed,
            }
        })
        .collect();
    Ok(Ensemble { members })
}

/// Degree-preserving ensemble without census constraint, used to score motifs.
pub fn degree_preserving_ensemble(
    g: &DirectedGraph,
    size: usize,
    swap_multiplier: usize,
    policy: LoopPolicy,
    seed: u64,
) -> Vec<DirectedGraph> {
    (0..size)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            rewire_with_policy(g, swap_multiplier, policy, &mut rng)
        })
        .collect()
}
