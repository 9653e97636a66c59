use rayon::prelude::*;
use serde::Serialize;

use super::model::CircuitModel;
use crate::error::{Error, Result};

pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_HORIZON: f64 = 200.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub model: String,
    pub variables: Vec<String>,
    pub step: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn series(&self, var: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[var]).collect()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectories hold at least the initial state")
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    /// CSV with header `t,<var1>,<var2>,...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.times.len() * 16 * (self.variables.len() + 1));
        out.push('t');
        for v in &self.variables {
            out.push(',');
            out.push_str(v);
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            out.push_str(&t.to_string());
            for x in s {
                out.push(',');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn step_count(horizon: f64, step: f64) -> Result<usize> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(horizon.is_finite() && horizon >= step) {
        return Err(Error::InvalidArgument(format!("horizon {horizon} must be at least the step {step}")));
    }
    let n = horizon / step;
    let rounded = n.round();
    if (n - rounded).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::InvalidArgument(format!("horizon {horizon} is not a multiple of the step {step}")));
    }
    Ok(rounded as usize)
}

/// Fixed-step classical RK4 from `initial` over `[0, horizon]`, clipping
/// states at zero after every step.
pub fn integrate(model: &CircuitModel, initial: &[f64], horizon: f64, step: f64) -> Result<Trajectory> {
    let d = model.dim();
    if initial.len() != d {
        return Err(Error::InvalidArgument(format!(
            "model {} has {d} variables, {} initial values given",
            model.id,
            initial.len()
        )));
    }
    if initial.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidArgument("initial values must be finite and non-negative".into()));
    }
    let steps = step_count(horizon, step)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(initial.to_vec());

    let mut x = initial.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    for i in 1..=steps {
        model.rhs_into(&x, &mut k1);
        for j in 0..d {
            tmp[j] = x[j] + 0.5 * step * k1[j];
        }
        model.rhs_into(&tmp, &mut k2);
        for j in 0..d {
            tmp[j] = x[j] + 0.5 * step * k2[j];
        }
        model.rhs_into(&tmp, &mut k3);
        for j in 0..d {
            tmp[j] = x[j] + step * k3[j];
        }
        model.rhs_into(&tmp, &mut k4);
        for j in 0..d {
            x[j] = (x[j] + step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])).max(0.0);
        }
        let t = i as f64 * step;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { time: t });
        }
        times.push(t);
        states.push(x.clone());
    }
    Ok(Trajectory {
        model: model.id.clone(),
        variables: model.variables.clone(),
        step,
        times,
        states,
    })
}

/// Integrates several initial conditions in parallel; results keep input order.
pub fn integrate_many(model: &CircuitModel, initials: &[Vec<f64>], horizon: f64, step: f64) -> Result<Vec<Trajectory>> {
    initials
        .par_iter()
        .map(|x0| integrate(model, x0, horizon, step))
        .collect()
}

/// Parses `"X=0.1,Y=0.2"`; unspecified variables take `default`.
pub fn parse_initial(model: &CircuitModel, spec: &str, default: f64) -> Result<Vec<f64>> {
    let mut x = vec![default; model.dim()];
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("initial condition `{part}` is not NAME=VALUE")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("initial value `{value}` is not a number")))?;
        x[model.variable_index(name.trim())?] = v;
    }
    Ok(x)
}
