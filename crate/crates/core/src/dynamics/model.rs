use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::combinatorics::Sign;
use crate::error::{Error, Result};

/// One multiplicative term in a production function.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Factor {
    Constant { value: f64 },
    Hill { source: usize, sign: Sign, n: f64, k: f64 },
}

impl Factor {
    pub fn value(&self, state: &[f64]) -> f64 {
        match *self {
            Factor::Constant { value } => value,
            Factor::Hill { source, sign, n, k } => hill(state[source], sign, n, k),
        }
    }

    /// Derivative with respect to the source variable (zero for constants).
    pub fn derivative(&self, state: &[f64]) -> f64 {
        match *self {
            Factor::Constant { .. } => 0.0,
            Factor::Hill { source, sign, n, k } => {
                let d = hill_derivative(state[source], n, k);
                match sign {
                    Sign::Activation => d,
                    Sign::Repression => -d,
                }
            }
        }
    }

    /// Largest value the factor can take.
    pub fn max_value(&self) -> f64 {
        match *self {
            Factor::Constant { value } => value,
            Factor::Hill { .. } => 1.0,
        }
    }
}

/// Hill input function: `x^n/(k^n+x^n)` for activation, `k^n/(k^n+x^n)` for repression.
pub fn hill(x: f64, sign: Sign, n: f64, k: f64) -> f64 {
    let x = x.max(0.0);
    let up = if x == 0.0 { 0.0 } else { 1.0 / (1.0 + (k / x).powf(n)) };
    match sign {
        Sign::Activation => up,
        Sign::Repression => 1.0 - up,
    }
}

/// Derivative of the increasing Hill function, `n k^n x^(n-1) / (k^n+x^n)^2`.
fn hill_derivative(x: f64, n: f64, k: f64) -> f64 {
    let x = x.max(0.0);
    let kn = k.powf(n);
    let denom = kn + x.powf(n);
    n * kn * x.powf(n - 1.0) / (denom * denom)
}

/// Hill-kinetics circuit: `v' = Π factors(v) − v` for each variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitModel {
    pub id: String,
    pub description: String,
    pub variables: Vec<String>,
    pub factors: Vec<Vec<Factor>>,
}

/// A signed regulatory edge with its Hill parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitEdge {
    pub from: String,
    pub to: String,
    pub sign: Sign,
    pub n: f64,
    pub k: f64,
}

/// Serialized circuit topology: variables, signed edges and constant productions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CircuitTopology {
    #[serde(default)]
    pub id: Option<String>,
    pub variables: Vec<String>,
    #[serde(default)]
    pub edges: Vec<CircuitEdge>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
}

fn check_hill(n: f64, k: f64, what: &str) -> Result<()> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::InvalidArgument(format!("cooperativity of {what} must be at least 1, got {n}")));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!("half-max level of {what} must be positive, got {k}")));
    }
    Ok(())
}

/// Builds a model from a topology. Constants come first in each production,
/// followed by edge factors in the order given. A variable without factors
/// has production 1.
pub fn build_circuit(topology: &CircuitTopology) -> Result<CircuitModel> {
    let vars = &topology.variables;
    if vars.is_empty() {
        return Err(Error::InvalidArgument("circuit has no variables".into()));
    }
    let index = |name: &str| {
        vars.iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variable `{name}`")))
    };
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::InvalidArgument(format!("duplicate variable `{v}`")));
        }
    }
    let mut factors = vec![Vec::new(); vars.len()];
    for (name, &value) in &topology.constants {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidArgument(format!("production of `{name}` must be a finite non-negative number")));
        }
        factors[index(name)?].push(Factor::Constant { value });
    }
    for e in &topology.edges {
        check_hill(e.n, e.k, &format!("edge {}->{}", e.from, e.to))?;
        let source = index(&e.from)?;
        factors[index(&e.to)?].push(Factor::Hill {
            source,
            sign: e.sign,
            n: e.n,
            k: e.k,
        });
    }
    Ok(CircuitModel {
        id: topology.id.clone().unwrap_or_else(|| "custom".into()),
        description: String::new(),
        variables: vars.clone(),
        factors,
    })
}

impl CircuitModel {
    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::InvalidArgument(format!("model {} has no variable `{name}`", self.id)))
    }

    pub fn production(&self, i: usize, state: &[f64]) -> f64 {
        self.factors[i].iter().map(|f| f.value(state)).product()
    }

    /// Upper bound of each variable's production.
    pub fn max_production(&self) -> Vec<f64> {
        self.factors
            .iter()
            .map(|fs| fs.iter().map(Factor::max_value).product())
            .collect()
    }

    pub fn rhs(&self, state: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.rhs_into(state, &mut out);
        out
    }

    pub fn rhs_into(&self, state: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.production(i, state) - state[i];
        }
    }

    /// Analytic Jacobian, row `i` holding the partials of `v_i'`.
    pub fn jacobian(&self, state: &[f64]) -> nalgebra::DMatrix<f64> {
        let d = self.dim();
        let mut j = nalgebra::DMatrix::zeros(d, d);
        for (i, fs) in self.factors.iter().enumerate() {
            let values: Vec<f64> = fs.iter().map(|f| f.value(state)).collect();
            for (a, f) in fs.iter().enumerate() {
                if let Factor::Hill { source, .. } = *f {
                    let others: f64 = values
                        .iter()
                        .enumerate()
                        .filter(|&(b, _)| b != a)
                        .map(|(_, v)| v)
                        .product();
                    j[(i, source)] += f.derivative(state) * others;
                }
            }
            j[(i, i)] -= 1.0;
        }
        j
    }

    /// True when the regulatory graph (including self-loops) has no cycle.
    pub fn is_feedforward(&self) -> bool {
        let d = self.dim();
        let mut indeg = vec![0usize; d];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); d];
        for (i, fs) in self.factors.iter().enumerate() {
            for f in fs {
                if let Factor::Hill { source, .. } = *f {
                    out[source].push(i);
                    indeg[i] += 1;
                }
            }
        }
        let mut stack: Vec<usize> = (0..d).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &v in &out[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        seen == d
    }

    /// Overrides a Hill parameter named like `n_xy` or `k_xy` (edge from X to Y).
    pub fn set_parameter(&mut self, name: &str, value: f64) -> Result<()> {
        let bad = || Error::InvalidArgument(format!("parameter `{name}` is not of the form n_<from><to> or k_<from><to>"));
        let (kind, edge) = name.split_once('_').ok_or_else(bad)?;
        let mut chars = edge.chars();
        let (Some(from), Some(to), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(bad());
        };
        let from = self.variable_index(&from.to_string())?;
        let to = self.variable_index(&to.to_string())?;
        let mut hit = false;
        for f in &mut self.factors[to] {
            if let Factor::Hill { source, n, k, .. } = f {
                if *source == from {
                    match kind {
                        "n" => *n = value,
                        "k" => *k = value,
                        _ => return Err(bad()),
                    }
                    check_hill(*n, *k, name)?;
                    hit = true;
                }
            }
        }
        if hit {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("model {} has no edge for parameter `{name}`", self.id)))
        }
    }

    /// Sets the cooperativity (`'n'`) or half-max level (`'k'`) of every Hill factor.
    pub fn set_all(&mut self, kind: char, value: f64) -> Result<()> {
        for f in self.factors.iter_mut().flatten() {
            if let Factor::Hill { n, k, .. } = f {
                match kind {
                    'n' => *n = value,
                    'k' => *k = value,
                    _ => return Err(Error::InvalidArgument(format!("unknown Hill parameter `{kind}`"))),
                }
                check_hill(*n, *k, "override")?;
            }
        }
        Ok(())
    }

    /// Human-readable equations, one per variable.
    pub fn equations(&self) -> Vec<String> {
        self.variables
            .iter()
            .zip(&self.factors)
            .map(|(v, fs)| {
                let mut s = format!("{v}' = ");
                if fs.is_empty() {
                    s.push('1');
                }
                for (a, f) in fs.iter().enumerate() {
                    if a > 0 {
                        s.push_str(" * ");
                    }
                    match *f {
                        Factor::Constant { value } => {
                            let _ = write!(s, "{value}");
                        }
                        Factor::Hill { source, sign, n, k } => {
                            let x = &self.variables[source];
                            let num = match sign {
                                Sign::Activation => format!("{x}^{n}"),
                                Sign::Repression => format!("{k}^{n}"),
                            };
                            let _ = write!(s, "{num}/({k}^{n} + {x}^{n})");
                        }
                    }
                }
                let _ = write!(s, " - {v}");
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_jacobian(m: &CircuitModel, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let d = m.dim();
        let mut j = nalgebra::DMatrix::zeros(d, d);
        for c in 0..d {
            let h = 1e-6 * x[c].abs().max(1e-3);
            let mut up = x.to_vec();
            let mut dn = x.to_vec();
            up[c] += h;
            dn[c] -= h;
            let (fu, fd) = (m.rhs(&up), m.rhs(&dn));
            for r in 0..d {
                j[(r, c)] = (fu[r] - fd[r]) / (2.0 * h);
            }
        }
        j
    }

    fn edge(from: &str, to: &str, sign: Sign, n: f64, k: f64) -> CircuitEdge {
        CircuitEdge {
            from: from.into(),
            to: to.into(),
            sign,
            n,
            k,
        }
    }

    #[test]
    fn hill_reference_values() {
        assert_eq!(hill(0.0, Sign::Activation, 3.0, 0.3), 0.0);
        assert_eq!(hill(0.0, Sign::Repression, 3.0, 0.3), 1.0);
        assert!((hill(0.3, Sign::Activation, 3.0, 0.3) - 0.5).abs() < 1e-15);
        assert!((hill(0.3, Sign::Repression, 1.0, 0.3) - 0.5).abs() < 1e-15);
        assert!((hill(2.0, Sign::Activation, 2.0, 1.0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn constant_source_and_isolated_decay() {
        let topo = CircuitTopology {
            variables: vec!["X".into()],
            constants: [("X".to_string(), 1.0)].into(),
            ..Default::default()
        };
        let m = build_circuit(&topo).unwrap();
        assert_eq!(m.rhs(&[0.25]), vec![0.75]);
        assert_eq!(m.jacobian(&[0.25])[(0, 0)], -1.0);

        let topo = CircuitTopology {
            variables: vec!["X".into()],
            constants: [("X".to_string(), 0.0)].into(),
            ..Default::default()
        };
        let m = build_circuit(&topo).unwrap();
        assert_eq!(m.rhs(&[2.0]), vec![-2.0]);
        assert_eq!(m.jacobian(&[2.0]).as_slice(), &[-1.0]);
    }

    #[test]
    fn incoherent_ffl_structure() {
        let topo = CircuitTopology {
            variables: vec!["X".into(), "Y".into(), "Z".into()],
            edges: vec![
                edge("X", "Y", Sign::Activation, 1.0, 0.01),
                edge("X", "Z", Sign::Activation, 1.0, 0.01),
                edge("Y", "Z", Sign::Repression, 1.0, 0.5),
            ],
            constants: [("X".to_string(), 1.0)].into(),
            id: None,
        };
        let m = build_circuit(&topo).unwrap();
        let s = [0.4, 0.3, 0.2];
        let z = 0.4 / (0.01 + 0.4) * 0.5 / (0.5 + 0.3) - 0.2;
        assert!((m.rhs(&s)[2] - z).abs() < 1e-15);
        assert!((m.rhs(&s)[1] - (0.4 / 0.41 - 0.3)).abs() < 1e-15);
        assert!(m.is_feedforward());
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut topo = CircuitTopology {
            variables: vec!["X".into(), "Y".into()],
            edges: vec![edge("X", "Y", Sign::Activation, 0.5, 0.1)],
            ..Default::default()
        };
        assert!(build_circuit(&topo).is_err());
        topo.edges[0] = edge("X", "Y", Sign::Activation, 2.0, 0.0);
        assert!(build_circuit(&topo).is_err());
        topo.edges[0] = edge("X", "Q", Sign::Activation, 2.0, 0.1);
        assert!(build_circuit(&topo).is_err());
    }

    #[test]
    fn parameter_override() {
        let topo = CircuitTopology {
            variables: vec!["X".into()],
            edges: vec![edge("X", "X", Sign::Activation, 3.0, 0.3)],
            ..Default::default()
        };
        let mut m = build_circuit(&topo).unwrap();
        assert!(!m.is_feedforward());
        m.set_parameter("n_xx", 1.0).unwrap();
        assert_eq!(m.factors[0][0], Factor::Hill { source: 0, sign: Sign::Activation, n: 1.0, k: 0.3 });
        assert!(m.set_parameter("n_xy", 1.0).is_err());
        assert!(m.set_parameter("q_xx", 1.0).is_err());
        assert!(m.set_parameter("n_xx", 0.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn jacobian_matches_finite_differences(
            n in proptest::collection::vec(1.0f64..4.0, 5),
            k in proptest::collection::vec(0.05f64..1.0, 5),
            x in proptest::collection::vec(0.01f64..1.5, 3),
            signs in proptest::collection::vec(proptest::bool::ANY, 5),
        ) {
            let s = |b: bool| if b { Sign::Activation } else { Sign::Repression };
            let topo = CircuitTopology {
                variables: vec!["X".into(), "Y".into(), "Z".into()],
                edges: vec![
                    edge("X", "X", s(signs[0]), n[0], k[0]),
                    edge("Y", "X", s(signs[1]), n[1], k[1]),
                    edge("X", "Y", s(signs[2]), n[2], k[2]),
                    edge("Z", "Y", s(signs[3]), n[3], k[3]),
                    edge("Y", "Z", s(signs[4]), n[4], k[4]),
                ],
                constants: [("Z".to_string(), 0.7)].into(),
                id: None,
            };
            let m = build_circuit(&topo).unwrap();
            let a = m.jacobian(&x);
            let f = fd_jacobian(&m, &x);
            for (u, v) in a.iter().zip(f.iter()) {
                proptest::prop_assert!((u - v).abs() <= 1e-6 * u.abs().max(1.0));
            }
        }
    }
}
