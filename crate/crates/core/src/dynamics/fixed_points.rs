use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::model::CircuitModel;
use crate::error::Result;

/// Residual norm a Newton solution must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Max-norm distance under which two solutions are merged.
pub const DEDUPE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    SpiralStable,
    SpiralUnstable,
}

impl Stability {
    pub fn is_stable(self) -> bool {
        matches!(self, Stability::Stable | Stability::SpiralStable)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub point: Vec<f64>,
    pub stability: Stability,
    pub eigenvalues: Vec<Eigenvalue>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointSearch {
    /// Grid points per axis, used when the dimension is at most `max_grid_dim`.
    pub grid_points: usize,
    pub max_grid_dim: usize,
    /// Random starts for higher dimensions.
    pub random_starts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for FixedPointSearch {
    fn default() -> Self {
        Self {
            grid_points: 7,
            max_grid_dim: 4,
            random_starts: 2000,
            max_iterations: 200,
            seed: 0,
        }
    }
}

/// Eigenvalues sorted by real then imaginary part. Triangular matrices
/// (feedforward circuits) return their diagonal exactly; the iterative solver
/// loses accuracy on the repeated eigenvalues they typically have.
pub fn eigenvalues(j: &DMatrix<f64>) -> Vec<Eigenvalue> {
    let n = j.nrows();
    let lower = (0..n).all(|r| (r + 1..n).all(|c| j[(r, c)] == 0.0));
    let upper = (0..n).all(|r| (0..r).all(|c| j[(r, c)] == 0.0));
    let mut ev: Vec<Eigenvalue> = if lower || upper {
        (0..n).map(|i| Eigenvalue { re: j[(i, i)], im: 0.0 }).collect()
    } else {
        j.clone()
            .complex_eigenvalues()
            .iter()
            .map(|c| Eigenvalue { re: c.re, im: c.im })
            .collect()
    };
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

pub fn classify_stability(ev: &[Eigenvalue]) -> Stability {
    const TOL: f64 = 1e-10;
    let neg = ev.iter().filter(|e| e.re < -TOL).count();
    let complex = ev.iter().any(|e| e.im.abs() > TOL);
    match (neg, complex) {
        (n, false) if n == ev.len() => Stability::Stable,
        (n, true) if n == ev.len() => Stability::SpiralStable,
        (0, false) => Stability::Unstable,
        (0, true) => Stability::SpiralUnstable,
        _ => Stability::Saddle,
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton iteration kept inside the non-negative orthant.
fn newton(model: &CircuitModel, start: &[f64], max_iterations: usize) -> Option<Vec<f64>> {
    let d = model.dim();
    let mut x = start.to_vec();
    let mut f = model.rhs(&x);
    let mut fnorm = norm(&f);
    for _ in 0..max_iterations {
        if fnorm < RESIDUAL_TOLERANCE * 1e-3 {
            break;
        }
        let j = model.jacobian(&x);
        let dx = j.lu().solve(&(-DVector::from_vec(f.clone())))?;
        if dx.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = (0..d).map(|i| (x[i] + lambda * dx[i]).max(0.0)).collect();
            let ft = model.rhs(&trial);
            let nt = norm(&ft);
            if nt < fnorm || lambda < 1e-6 {
                if nt >= fnorm && lambda < 1e-6 {
                    return (fnorm < RESIDUAL_TOLERANCE).then_some(x);
                }
                x = trial;
                f = ft;
                fnorm = nt;
                break;
            }
            lambda *= 0.5;
        }
    }
    (fnorm < RESIDUAL_TOLERANCE).then_some(x)
}

fn starts(model: &CircuitModel, search: &FixedPointSearch) -> Vec<Vec<f64>> {
    let d = model.dim();
    // Scale by the production bound, with headroom for unit-production variables.
    let top: Vec<f64> = model.max_production().iter().map(|m| m.max(1e-3) * 1.05).collect();
    if d <= search.max_grid_dim {
        let g = search.grid_points.max(2);
        (0..d)
            .map(|i| (0..g).map(|a| top[i] * a as f64 / (g - 1) as f64).collect::<Vec<_>>())
            .multi_cartesian_product()
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
        (0..search.random_starts)
            .map(|_| top.iter().map(|&t| rng.random::<f64>() * t).collect())
            .collect()
    }
}

/// Multi-start damped Newton. Starts that fail to converge are skipped.
/// Points are deduplicated and sorted lexicographically.
pub fn find_fixed_points(model: &CircuitModel, search: &FixedPointSearch) -> Result<Vec<FixedPoint>> {
    let mut found: Vec<Vec<f64>> = Vec::new();
    for s in starts(model, search) {
        if let Some(x) = newton(model, &s, search.max_iterations) {
            if !found
                .iter()
                .any(|p| p.iter().zip(&x).all(|(a, b)| (a - b).abs() < DEDUPE_TOLERANCE))
            {
                found.push(x);
            }
        }
    }
    found.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(found
        .into_iter()
        .map(|point| {
            let ev = eigenvalues(&model.jacobian(&point));
            FixedPoint {
                residual: norm(&model.rhs(&point)),
                stability: classify_stability(&ev),
                eigenvalues: ev,
                point,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::catalog::circuit_library;

    /// Positive roots of x^3 − x^2 + k^3 = 0 by bisection on sign changes.
    fn cubic_roots(k: f64) -> Vec<f64> {
        let f = |x: f64| x * x * x - x * x + k * k * k;
        let mut roots = Vec::new();
        let n = 10_000;
        for i in 0..n {
            let (mut a, mut b) = (i as f64 / n as f64 * 1.5, (i + 1) as f64 / n as f64 * 1.5);
            if f(a).signum() != f(b).signum() {
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if f(a).signum() == f(m).signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
        roots
    }

    #[test]
    fn self_loop_bistability() {
        let m = circuit_library("M3").unwrap();
        let fps = find_fixed_points(&m, &FixedPointSearch::default()).unwrap();
        let roots = cubic_roots(0.3);
        assert_eq!(fps.len(), 3);
        assert_eq!(fps[0].point, vec![0.0]);
        assert_eq!(fps[0].stability, Stability::Stable);
        assert!((fps[1].point[0] - roots[0]).abs() < 1e-9);
        assert_eq!(fps[1].stability, Stability::Unstable);
        assert!((fps[2].point[0] - roots[1]).abs() < 1e-9);
        assert_eq!(fps[2].stability, Stability::Stable);
        assert!(fps.iter().all(|p| p.residual < RESIDUAL_TOLERANCE));
    }

    #[test]
    fn self_loop_without_cooperativity_is_monostable() {
        let mut m = circuit_library("M3").unwrap();
        m.set_parameter("n_xx", 1.0).unwrap();
        let fps = find_fixed_points(&m, &FixedPointSearch::default()).unwrap();
        // x/(k+x) = x gives x = 1 − k; the origin is then unstable.
        let stable: Vec<_> = fps.iter().filter(|p| p.stability.is_stable()).collect();
        assert_eq!(stable.len(), 1);
        assert!((stable[0].point[0] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn toggle_switch_has_two_stable_states() {
        let m = circuit_library("M4-5").unwrap();
        let fps = find_fixed_points(&m, &FixedPointSearch::default()).unwrap();
        assert_eq!(fps.len(), 3);
        let stable = fps.iter().filter(|p| p.stability.is_stable()).count();
        assert_eq!(stable, 2);
        let sym = fps.iter().find(|p| (p.point[0] - p.point[1]).abs() < 1e-9).unwrap();
        assert_eq!(sym.stability, Stability::Saddle);
    }

    #[test]
    fn oscillator_fixed_point_is_a_stable_spiral() {
        let m = circuit_library("M8-9").unwrap();
        let fps = find_fixed_points(&m, &FixedPointSearch::default()).unwrap();
        assert_eq!(fps.len(), 1);
        assert_eq!(fps[0].stability, Stability::SpiralStable);
    }

    #[test]
    fn triangular_eigenvalues_are_exact() {
        let j = DMatrix::from_row_slice(3, 3, &[-1.0, 0.0, 0.0, 0.3, -1.0, 0.0, 0.2, 5.0, -1.0]);
        assert!(eigenvalues(&j).iter().all(|e| e.re == -1.0 && e.im == 0.0));
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let ev = eigenvalues(&r);
        assert!(ev.iter().all(|e| e.re.abs() < 1e-12 && (e.im.abs() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn stability_labels() {
        let e = |re, im| Eigenvalue { re, im };
        assert_eq!(classify_stability(&[e(-1.0, 0.0), e(-2.0, 0.0)]), Stability::Stable);
        assert_eq!(classify_stability(&[e(1.0, 0.5), e(1.0, -0.5)]), Stability::SpiralUnstable);
        assert_eq!(classify_stability(&[e(1.0, 0.0), e(-2.0, 0.0)]), Stability::Saddle);
        assert_eq!(classify_stability(&[e(1.0, 0.0)]), Stability::Unstable);
        assert_eq!(classify_stability(&[e(-1.0, 2.0), e(-1.0, -2.0)]), Stability::SpiralStable);
    }
}
