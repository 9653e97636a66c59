use serde::Serialize;

use super::integrate::Trajectory;
use super::model::CircuitModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyTolerances {
    pub off_threshold: f64,
    /// Last/first peak amplitude ratio separating sustained from damped.
    pub decay_ratio: f64,
    pub min_peaks: usize,
    /// Leading fraction of the horizon discarded as transient.
    pub transient_fraction: f64,
    /// Swings smaller than this are treated as numerical noise.
    pub amplitude_tolerance: f64,
    /// Final value at or above this fraction of the production bound is ON.
    pub on_fraction: f64,
}

impl Default for ClassifyTolerances {
    fn default() -> Self {
        Self {
            off_threshold: 1e-3,
            decay_ratio: 0.95,
            min_peaks: 3,
            transient_fraction: 0.5,
            amplitude_tolerance: 1e-6,
            on_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SteadyState {
    Off,
    On,
    Intermediate,
    DampedOscillation,
    SustainedOscillation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableState {
    pub variable: String,
    pub class: SteadyState,
    pub final_value: f64,
    /// Peak-to-trough swing of the last post-transient peak (0 without oscillation).
    pub amplitude: f64,
    pub peaks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyStateClass {
    /// Highest-ranked variable class: sustained > damped > intermediate > on > off.
    pub overall: SteadyState,
    pub variables: Vec<VariableState>,
}

/// A local maximum with its swing to the adjacent trough.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Peak {
    index: usize,
    amplitude: f64,
}

fn peaks(x: &[f64], tol: f64) -> Vec<Peak> {
    let mut turns: Vec<(usize, bool)> = Vec::new();
    for i in 1..x.len().saturating_sub(1) {
        if x[i] > x[i - 1] && x[i] >= x[i + 1] {
            turns.push((i, true));
        } else if x[i] < x[i - 1] && x[i] <= x[i + 1] {
            turns.push((i, false));
        }
    }
    turns
        .iter()
        .enumerate()
        .filter(|(_, t)| t.1)
        .filter_map(|(a, &(i, _))| {
            let next = turns[a + 1..].iter().find(|t| !t.1).map(|t| x[t.0]);
            let prev = turns[..a].iter().rev().find(|t| !t.1).map(|t| x[t.0]);
            let trough = next.or(prev)?;
            let amplitude = x[i] - trough;
            (amplitude > tol).then_some(Peak { index: i, amplitude })
        })
        .collect()
}

fn transient_cut(traj: &Trajectory, tol: &ClassifyTolerances) -> Result<usize> {
    if traj.times.len() < 10 {
        return Err(Error::InvalidArgument(format!(
            "trajectory has {} samples, too short to classify",
            traj.times.len()
        )));
    }
    if !(0.0..1.0).contains(&tol.transient_fraction) {
        return Err(Error::InvalidArgument("transient fraction must lie in [0, 1)".into()));
    }
    let cut = traj.horizon() * tol.transient_fraction;
    Ok(traj.times.partition_point(|&t| t < cut))
}

fn classify_series(x: &[f64], cut: usize, max_production: f64, tol: &ClassifyTolerances) -> (SteadyState, f64, usize) {
    let post = &x[cut..];
    let final_value = *x.last().expect("nonempty");
    let late = peaks(post, tol.amplitude_tolerance);
    if late.len() >= tol.min_peaks {
        let ratio = late.last().unwrap().amplitude / late[0].amplitude;
        if ratio >= tol.decay_ratio {
            return (SteadyState::SustainedOscillation, late.last().unwrap().amplitude, late.len());
        }
    }
    let all = peaks(x, tol.amplitude_tolerance);
    if all.len() >= tol.min_peaks && all.last().unwrap().amplitude / all[0].amplitude < tol.decay_ratio {
        return (SteadyState::DampedOscillation, late.last().map_or(0.0, |p| p.amplitude), all.len());
    }
    let class = if post.iter().all(|&v| v < tol.off_threshold) {
        SteadyState::Off
    } else if final_value >= tol.on_fraction * max_production {
        SteadyState::On
    } else {
        SteadyState::Intermediate
    };
    (class, 0.0, all.len())
}

/// Classifies each variable's long-time behavior after discarding the transient.
pub fn classify_steady_state(model: &CircuitModel, traj: &Trajectory, tol: &ClassifyTolerances) -> Result<SteadyStateClass> {
    if traj.variables != model.variables {
        return Err(Error::InvalidArgument("trajectory variables do not match the model".into()));
    }
    let cut = transient_cut(traj, tol)?;
    let bounds = model.max_production();
    let variables: Vec<VariableState> = traj
        .variables
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let (class, amplitude, peaks) = classify_series(&traj.series(i), cut, bounds[i], tol);
            VariableState {
                variable: name.clone(),
                class,
                final_value: traj.final_state()[i],
                amplitude,
                peaks,
            }
        })
        .collect();
    let overall = variables.iter().map(|v| v.class).max().expect("models have variables");
    Ok(SteadyStateClass { overall, variables })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseMetrics {
    pub peak_value: f64,
    pub peak_time: f64,
    pub final_value: f64,
    /// Time spent above half the peak, when the response falls back below it.
    pub pulse_width: Option<f64>,
    /// Time to reach half the final value, for rising responses.
    pub response_delay: Option<f64>,
}

/// Time at which the segment `i-1 → i` crosses `level`, by linear interpolation.
fn crossing(t: &[f64], x: &[f64], i: usize, level: f64) -> f64 {
    let (x0, x1) = (x[i - 1], x[i]);
    if x1 == x0 {
        return t[i];
    }
    t[i - 1] + (level - x0) / (x1 - x0) * (t[i] - t[i - 1])
}

pub fn pulse_metrics(traj: &Trajectory, var: usize) -> Result<PulseMetrics> {
    if var >= traj.variables.len() {
        return Err(Error::InvalidArgument(format!("variable index {var} out of range")));
    }
    let x = traj.series(var);
    let t = &traj.times;
    let (ip, &peak) = x
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("nonempty");
    let final_value = *x.last().unwrap();
    let half = peak / 2.0;
    let pulse_width = (ip > 0 && peak > x[0] && final_value < half).then(|| {
        let start = (1..=ip).rev().find(|&i| x[i - 1] < half).map_or(t[0], |i| crossing(t, &x, i, half));
        let end = (ip + 1..x.len()).find(|&i| x[i] < half).map_or(t[t.len() - 1], |i| crossing(t, &x, i, half));
        end - start
    });
    let target = final_value / 2.0;
    let response_delay = (final_value > x[0] && x[0] < target)
        .then(|| (1..x.len()).find(|&i| x[i] >= target).map(|i| crossing(t, &x, i, target)))
        .flatten();
    Ok(PulseMetrics {
        peak_value: peak,
        peak_time: t[ip],
        final_value,
        pulse_width,
        response_delay,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    InPhase,
    AntiPhase,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRelation {
    pub period: f64,
    /// Shift of `b` behind `a`, wrapped to (−period/2, period/2].
    pub lag: f64,
    pub relation: Relation,
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Period and lag between two oscillating variables over the post-transient window.
pub fn phase_relation(
    traj_a: &Trajectory,
    var_a: usize,
    traj_b: &Trajectory,
    var_b: usize,
    tol: &ClassifyTolerances,
) -> Result<PhaseRelation> {
    if traj_a.times != traj_b.times {
        return Err(Error::InvalidArgument("trajectories must share a time grid".into()));
    }
    let cut = transient_cut(traj_a, tol)?;
    let a = &traj_a.series(var_a)[cut..];
    let b = &traj_b.series(var_b)[cut..];
    let pa = peaks(a, tol.amplitude_tolerance);
    let pb = peaks(b, tol.amplitude_tolerance);
    if pa.len() < tol.min_peaks || pb.len() < tol.min_peaks {
        return Err(Error::InvalidArgument("phase relation needs two oscillating variables".into()));
    }
    let step = traj_a.step;
    let spacing = (pa.last().unwrap().index - pa[0].index) as f64 / (pa.len() - 1) as f64;
    let period = spacing * step;
    let max_shift = (spacing.round() as usize).min(a.len() - 2);
    let mut best = (0usize, f64::NEG_INFINITY);
    for s in 0..max_shift {
        let c = pearson(&a[..a.len() - s], &b[s..]);
        if c > best.1 {
            best = (s, c);
        }
    }
    let mut lag = best.0 as f64 * step;
    if lag > period / 2.0 {
        lag -= period;
    }
    let relation = if lag.abs() < 0.1 * period {
        Relation::InPhase
    } else if (lag.abs() - period / 2.0).abs() < 0.1 * period {
        Relation::AntiPhase
    } else {
        Relation::None
    };
    Ok(PhaseRelation { period, lag, relation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::catalog::circuit_library;
    use crate::dynamics::integrate::integrate;

    fn synthetic(f: impl Fn(f64) -> Vec<f64>, vars: usize, horizon: f64, step: f64) -> Trajectory {
        let n = (horizon / step).round() as usize;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
        Trajectory {
            model: "synthetic".into(),
            variables: (0..vars).map(|i| format!("V{i}")).collect(),
            step,
            states: times.iter().map(|&t| f(t)).collect(),
            times,
        }
    }

    #[test]
    fn box_pulse_width() {
        let tr = synthetic(|t| vec![if (2.0..7.0).contains(&t) { 1.0 } else { 0.0 }], 1, 20.0, 0.01);
        let p = pulse_metrics(&tr, 0).unwrap();
        assert!((p.pulse_width.unwrap() - 5.0).abs() <= 0.01 + 1e-9);
        assert_eq!(p.response_delay, None);
    }

    #[test]
    fn exponential_rise_delay() {
        let m = circuit_library("M14-16").unwrap();
        let tr = integrate(&m, &[0.0, 0.0, 0.0], 20.0, 0.01).unwrap();
        let p = pulse_metrics(&tr, 0).unwrap();
        assert!((p.response_delay.unwrap() - 2f64.ln()).abs() <= 0.01);
        assert_eq!(p.pulse_width, None);
    }

    #[test]
    fn sinusoid_phase() {
        let w = 2.0 * std::f64::consts::PI / 5.0;
        let tr = synthetic(|t| vec![(w * t).sin(), (w * t).sin(), -(w * t).sin()], 3, 100.0, 0.01);
        let tol = ClassifyTolerances::default();
        let same = phase_relation(&tr, 0, &tr, 1, &tol).unwrap();
        assert!((same.period - 5.0).abs() < 0.02);
        assert_eq!(same.lag, 0.0);
        assert_eq!(same.relation, Relation::InPhase);
        let anti = phase_relation(&tr, 0, &tr, 2, &tol).unwrap();
        assert_eq!(anti.relation, Relation::AntiPhase);
        assert!((anti.lag.abs() - 2.5).abs() < 0.05);
    }

    #[test]
    fn phase_needs_oscillation() {
        let tr = synthetic(|t| vec![(-t).exp(), 1.0], 2, 50.0, 0.01);
        assert!(phase_relation(&tr, 0, &tr, 1, &ClassifyTolerances::default()).is_err());
    }

    #[test]
    fn lock_on_origin_is_off() {
        let m = circuit_library("M6-7").unwrap();
        let tr = integrate(&m, &[0.0, 0.0], 50.0, 0.01).unwrap();
        let c = classify_steady_state(&m, &tr, &ClassifyTolerances::default()).unwrap();
        assert_eq!(c.overall, SteadyState::Off);
    }

    #[test]
    fn oscillator_is_damped() {
        let m = circuit_library("M8-9").unwrap();
        let tr = integrate(&m, &[0.1, 0.2], 200.0, 0.01).unwrap();
        let c = classify_steady_state(&m, &tr, &ClassifyTolerances::default()).unwrap();
        assert_eq!(c.overall, SteadyState::DampedOscillation);
    }

    #[test]
    fn coherent_ffl_turns_on() {
        let m = circuit_library("M14-16").unwrap();
        let tr = integrate(&m, &[0.0, 0.0, 0.0], 50.0, 0.01).unwrap();
        let c = classify_steady_state(&m, &tr, &ClassifyTolerances::default()).unwrap();
        assert!(c.variables.iter().all(|v| v.class == SteadyState::On));
    }

    #[test]
    fn short_trajectory_rejected() {
        let m = circuit_library("M3").unwrap();
        let tr = integrate(&m, &[0.5], 0.05, 0.01).unwrap();
        assert!(classify_steady_state(&m, &tr, &ClassifyTolerances::default()).is_err());
    }

    #[test]
    fn peak_detection_ignores_noise() {
        let x = [0.0, 1.0, 0.0, 0.5, 0.5 + 1e-12, 0.5, 0.9, 0.1];
        let p = peaks(&x, 1e-6);
        assert_eq!(p.iter().map(|p| p.index).collect::<Vec<_>>(), vec![1, 6]);
    }
}
