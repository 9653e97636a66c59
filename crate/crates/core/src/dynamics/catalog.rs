//! Named circuit models with their published parameter values.

use serde::Serialize;

use super::model::{build_circuit, CircuitEdge, CircuitModel, CircuitTopology};
use crate::combinatorics::Sign;
use crate::error::{Error, Result};

struct Spec {
    topo: CircuitTopology,
    description: &'static str,
}

impl Spec {
    fn new(id: &str, description: &'static str, vars: &[&str]) -> Self {
        Self {
            topo: CircuitTopology {
                id: Some(id.into()),
                variables: vars.iter().map(|v| v.to_string()).collect(),
                ..Default::default()
            },
            description,
        }
    }

    fn constant(mut self, var: &str, value: f64) -> Self {
        self.topo.constants.insert(var.into(), value);
        self
    }

    fn edge(mut self, from: &str, to: &str, sign: Sign, n: f64, k: f64) -> Self {
        self.topo.edges.push(CircuitEdge {
            from: from.into(),
            to: to.into(),
            sign,
            n,
            k,
        });
        self
    }

    fn act(self, from: &str, to: &str, n: f64, k: f64) -> Self {
        self.edge(from, to, Sign::Activation, n, k)
    }

    fn rep(self, from: &str, to: &str, n: f64, k: f64) -> Self {
        self.edge(from, to, Sign::Repression, n, k)
    }

    fn sl(self, var: &str, n: f64, k: f64) -> Self {
        self.act(var, var, n, k)
    }

    fn build(self) -> CircuitModel {
        let mut m = build_circuit(&self.topo).expect("catalog parameters are valid");
        m.description = self.description.into();
        m
    }
}

/// Feedforward loop X→Y→Z, X→Z with X' = 1 − X; `loop_on` adds a self-loop.
fn ffl(id: &str, description: &'static str, coherent: bool, loop_on: Option<(&str, f64)>) -> Spec {
    let mut s = Spec::new(id, description, &["X", "Y", "Z"]).constant("X", 1.0);
    if let Some(("X", k)) = loop_on {
        s = s.sl("X", 3.0, k);
    }
    if let Some(("Y", k)) = loop_on {
        s = s.sl("Y", 3.0, k);
    }
    s = s.act("X", "Y", 1.0, 0.01);
    if let Some(("Z", k)) = loop_on {
        s = s.sl("Z", 3.0, k);
    }
    s = s.act("X", "Z", 1.0, 0.01);
    if coherent {
        s.act("Y", "Z", 1.0, 0.01)
    } else {
        s.rep("Y", "Z", 1.0, 0.5)
    }
}

/// Two-variable FFL reduction with a step input of level `xf`.
fn ffl_step(id: &str, description: &'static str, coherent: bool, loop_on: Option<&str>) -> Spec {
    let (k_yz, k_ii) = if coherent { (0.01, 0.3) } else { (1.0, 0.25) };
    let mut s = Spec::new(id, description, &["Y", "Z"]).constant("Y", 1.0).constant("Z", 1.0);
    if loop_on == Some("Y") {
        s = s.sl("Y", 3.0, k_ii);
    }
    if loop_on == Some("Z") {
        s = s.sl("Z", 3.0, k_ii);
    }
    if coherent {
        s.act("Y", "Z", 1.0, k_yz)
    } else {
        s.rep("Y", "Z", 1.0, k_yz)
    }
}

/// Oscillator feedback combined with an FFL through the FFL's intermediate node.
fn ffl_oscillator(id: &str, description: &'static str, coherent: bool) -> Spec {
    let s = Spec::new(id, description, &["X", "Y", "Z", "W"])
        .constant("X", 1.0)
        .sl("Y", 3.0, 0.2)
        .act("X", "Y", 1.0, 0.01)
        .act("W", "Y", 3.0, 0.3)
        .act("X", "Z", 1.0, 0.01);
    let s = if coherent {
        s.act("Y", "Z", 1.0, 0.01)
    } else {
        s.rep("Y", "Z", 1.0, 0.5)
    };
    s.sl("W", 3.0, 0.2).rep("Y", "W", 3.0, 0.3)
}

fn specs() -> Vec<Spec> {
    const N: f64 = 3.0;
    vec![
        Spec::new("M3", "positive self-loop", &["X"]).sl("X", N, 0.3),
        Spec::new("M4-5", "toggle-switch feedback", &["X", "Y"])
            .rep("Y", "X", N, 0.3)
            .rep("X", "Y", N, 0.3),
        Spec::new("M6-7", "lock-ON feedback", &["X", "Y"])
            .act("Y", "X", N, 0.3)
            .act("X", "Y", N, 0.3),
        Spec::new("M8-9", "oscillator feedback", &["X", "Y"])
            .act("Y", "X", N, 0.3)
            .rep("X", "Y", N, 0.3),
        Spec::new("M10-11", "toggle switch with positive self-loops", &["X", "Y"])
            .sl("X", N, 0.3)
            .rep("Y", "X", N, 0.3)
            .sl("Y", N, 0.3)
            .rep("X", "Y", N, 0.3),
        Spec::new("M12-13", "oscillator with positive self-loops", &["X", "Y"])
            .sl("X", N, 0.2)
            .act("Y", "X", N, 0.3)
            .sl("Y", N, 0.2)
            .rep("X", "Y", N, 0.3),
        ffl("M14-16", "coherent type-1 FFL", true, None),
        ffl("M14-16-SLX", "coherent FFL with self-loop on X", true, Some(("X", 0.3))),
        ffl("M14-16-SLY", "coherent FFL with self-loop on Y", true, Some(("Y", 0.3))),
        ffl("M14-16-SLZ", "coherent FFL with self-loop on Z", true, Some(("Z", 0.3))),
        ffl("M17-19", "incoherent type-1 FFL", false, None),
        ffl("M17-19-SLX", "incoherent FFL with self-loop on X", false, Some(("X", 0.3))),
        ffl("M17-19-SLY", "incoherent FFL with self-loop on Y", false, Some(("Y", 0.3))),
        ffl("M17-19-SLZ", "incoherent FFL with self-loop on Z", false, Some(("Z", 0.15))),
        Spec::new("M20-22a", "two oscillators sharing Y (first combination)", &["X", "Y", "Z"])
            .sl("X", N, 0.2)
            .act("Y", "X", N, 0.3)
            .sl("Y", N, 0.2)
            .rep("X", "Y", N, 0.3)
            .act("Z", "Y", N, 0.3)
            .sl("Z", N, 0.2)
            .rep("Y", "Z", N, 0.3),
        Spec::new("M22b-24", "two oscillators sharing Y (second combination)", &["X", "Y", "Z"])
            .sl("X", N, 0.2)
            .act("Y", "X", N, 0.3)
            .sl("Y", N, 0.2)
            .rep("X", "Y", N, 0.3)
            .rep("Z", "Y", N, 0.3)
            .sl("Z", N, 0.2)
            .act("Y", "Z", N, 0.3),
        Spec::new("M25-27", "two oscillators sharing Y (third combination)", &["X", "Y", "Z"])
            .sl("X", N, 0.2)
            .rep("Y", "X", N, 0.3)
            .sl("Y", N, 0.2)
            .act("X", "Y", N, 0.3)
            .act("Z", "Y", N, 0.3)
            .sl("Z", N, 0.2)
            .rep("Y", "Z", N, 0.3),
        ffl_oscillator("M27-30-coherent", "oscillator joined to a coherent FFL at Y", true),
        ffl_oscillator("M27-30-incoherent", "oscillator joined to an incoherent FFL at Y", false),
        Spec::new("M31-34", "two oscillators in a toggle-switch interaction (option 1)", &["X", "Y", "U", "V"])
            .sl("X", N, 0.2)
            .rep("Y", "X", N, 0.3)
            .rep("V", "X", 1.0, 0.01)
            .sl("Y", N, 0.2)
            .act("X", "Y", N, 0.3)
            .sl("U", N, 0.2)
            .rep("Y", "U", 1.0, 0.01)
            .rep("V", "U", N, 0.3)
            .sl("V", N, 0.2)
            .act("U", "V", N, 0.3),
        Spec::new("M35-38", "two oscillators in a toggle-switch interaction (option 2)", &["X", "Y", "U", "V"])
            .sl("X", N, 0.2)
            .rep("Y", "X", N, 0.3)
            .sl("Y", N, 0.2)
            .act("X", "Y", N, 0.3)
            .rep("U", "Y", 1.0, 0.01)
            .sl("U", N, 0.2)
            .rep("V", "U", N, 0.3)
            .sl("V", N, 0.2)
            .act("U", "V", N, 0.3)
            .rep("X", "V", 1.0, 0.01),
        Spec::new("M39-42", "two oscillators in a lock-ON interaction (option 1)", &["X", "Y", "U", "V"])
            .sl("X", N, 0.2)
            .rep("Y", "X", N, 0.3)
            .sl("Y", N, 0.2)
            .act("X", "Y", N, 0.3)
            .act("U", "Y", 1.0, 0.01)
            .sl("U", N, 0.2)
            .rep("V", "U", N, 0.3)
            .sl("V", N, 0.2)
            .act("U", "V", N, 0.3)
            .act("X", "V", 1.0, 0.01),
        Spec::new("M43-46", "two oscillators in a lock-ON interaction (option 2)", &["X", "Y", "U", "V"])
            .sl("X", N, 0.2)
            .rep("Y", "X", N, 0.3)
            .act("V", "X", 1.0, 0.01)
            .sl("Y", N, 0.2)
            .act("X", "Y", N, 0.3)
            .sl("U", N, 0.2)
            .act("Y", "U", 1.0, 0.01)
            .rep("V", "U", N, 0.3)
            .sl("V", N, 0.2)
            .act("U", "V", N, 0.3),
        Spec::new("M47-51", "coherent FFL interacting with a toggle switch", &["X", "Y", "Z", "U", "V"])
            .act("V", "X", 1.0, 0.01)
            .act("X", "Y", 1.0, 0.01)
            .act("Y", "Z", 1.0, 0.01)
            .act("X", "Z", 1.0, 0.01)
            .sl("U", 1.0, 0.3)
            .act("Z", "U", 1.0, 0.01)
            .rep("V", "U", N, 0.3)
            .sl("V", 1.0, 0.3)
            .rep("U", "V", N, 0.3),
        Spec::new("M52-57", "coherent and incoherent FFLs in a closed interaction", &["X", "Y", "Z", "W", "V", "U"])
            .act("U", "X", 1.0, 0.01)
            .act("X", "Y", 1.0, 0.01)
            .rep("Y", "Z", 1.0, 0.01)
            .act("X", "Z", 1.0, 0.01)
            .rep("Z", "W", 1.0, 0.01)
            .act("W", "V", 1.0, 70.8)
            .act("V", "U", 1.0, 13.4)
            .act("W", "U", 1.0, 55.9),
        Spec::new("M58-61", "two positive double mutual feedback circuits", &["X", "Y", "Z", "W"])
            .act("W", "X", N, 0.01)
            .act("Y", "X", N, 0.01)
            .act("Z", "Y", N, 0.01)
            .act("X", "Y", N, 0.01)
            .act("X", "Z", N, 0.01)
            .act("Y", "Z", N, 0.01)
            .act("W", "Z", N, 3.38)
            .act("X", "W", N, 0.01)
            .act("Z", "W", N, 0.16),
        Spec::new("M62-65", "double mutual feedback circuits with X repressing Z", &["X", "Y", "Z", "W"])
            .act("W", "X", N, 0.01)
            .act("Y", "X", N, 1.87)
            .act("Z", "Y", N, 0.01)
            .act("X", "Y", N, 0.01)
            .rep("X", "Z", N, 0.01)
            .act("Y", "Z", N, 0.01)
            .act("W", "Z", N, 0.01)
            .act("X", "W", N, 0.01)
            .act("Z", "W", N, 0.01),
        Spec::new("M62-65-sub", "the X, Y, Z sub-circuit of M62-65 without W", &["X", "Y", "Z"])
            .act("Y", "X", N, 1.87)
            .act("Z", "Y", N, 0.01)
            .act("X", "Y", N, 0.01)
            .rep("X", "Z", N, 0.01)
            .act("Y", "Z", N, 0.01),
        Spec::new("M66-69", "two 3-node loops sharing X and Y, Y repressing Z", &["X", "Y", "Z", "W"])
            .act("W", "X", N, 0.01)
            .act("Z", "X", N, 4.7)
            .act("X", "Y", N, 0.01)
            .rep("Y", "Z", N, 0.01)
            .act("Y", "W", N, 0.01),
        ffl_step("S1-S2", "coherent FFL with step input X_f = 1", true, None),
        ffl_step("S1-S2-SLY", "coherent FFL, step input, self-loop on Y", true, Some("Y")),
        ffl_step("S1-S2-SLZ", "coherent FFL, step input, self-loop on Z", true, Some("Z")),
        ffl_step("S3-S4", "incoherent FFL with step input X_f = 1", false, None),
        ffl_step("S3-S4-SLY", "incoherent FFL, step input, self-loop on Y", false, Some("Y")),
        ffl_step("S3-S4-SLZ", "incoherent FFL, step input, self-loop on Z", false, Some("Z")),
    ]
}

/// All catalog models in listing order.
pub fn catalog() -> Vec<CircuitModel> {
    specs().into_iter().map(Spec::build).collect()
}

pub fn catalog_ids() -> Vec<String> {
    specs().into_iter().filter_map(|s| s.topo.id).collect()
}

/// Looks up a catalog model by id (case-insensitive).
pub fn circuit_library(id: &str) -> Result<CircuitModel> {
    specs()
        .into_iter()
        .find(|s| s.topo.id.as_deref().is_some_and(|i| i.eq_ignore_ascii_case(id)))
        .map(Spec::build)
        .ok_or_else(|| Error::UnknownModel(id.into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: String,
    pub description: String,
    pub variables: Vec<String>,
    pub equations: Vec<String>,
    pub max_production: Vec<f64>,
}

pub fn catalog_listing() -> Vec<CatalogEntry> {
    catalog()
        .into_iter()
        .map(|m| CatalogEntry {
            equations: m.equations(),
            max_production: m.max_production(),
            description: m.description.clone(),
            variables: m.variables.clone(),
            id: m.id,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::model::Factor;

    #[test]
    fn ids_are_unique() {
        let ids = catalog_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids.len(), sorted.len());
        assert!(circuit_library("m66-69").is_ok());
        assert!(matches!(circuit_library("M99"), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn self_loop_model() {
        let m = circuit_library("M3").unwrap();
        let x: f64 = 0.5;
        let want = x.powi(3) / (0.3f64.powi(3) + x.powi(3)) - x;
        assert!((m.rhs(&[x])[0] - want).abs() < 1e-15);
    }

    #[test]
    fn coherent_ffl_equations() {
        let m = circuit_library("M14-16").unwrap();
        let s = [0.5, 0.2, 0.1];
        let r = m.rhs(&s);
        assert_eq!(r[0], 0.5);
        assert!((r[1] - (0.5 / 0.51 - 0.2)).abs() < 1e-15);
        assert!((r[2] - (0.5 / 0.51 * 0.2 / 0.21 - 0.1)).abs() < 1e-15);
    }

    #[test]
    fn loop_model_parameters() {
        let m = circuit_library("M66-69").unwrap();
        assert!(m.factors[0].contains(&Factor::Hill { source: 2, sign: Sign::Activation, n: 3.0, k: 4.7 }));
        assert_eq!(m.equations()[2], "Z' = 0.01^3/(0.01^3 + Y^3) - Z");
    }

    #[test]
    fn step_input_models() {
        let m = circuit_library("S3-S4").unwrap();
        assert_eq!(m.rhs(&[1.0, 0.0]), vec![0.0, 0.5]);
        let m = circuit_library("S1-S2-SLY").unwrap();
        assert_eq!(m.max_production(), vec![1.0, 1.0]);
    }
}
