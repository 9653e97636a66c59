use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::model::CircuitModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitConfig {
    pub x_var: usize,
    pub y_var: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Values of the remaining variables, held fixed.
    pub frozen: Vec<f64>,
}

impl PortraitConfig {
    /// Square grid over `[0, 1.1·bound]` for the first two variables.
    pub fn for_model(model: &CircuitModel, n: usize) -> Result<Self> {
        if model.dim() < 2 {
            return Err(Error::InvalidArgument(format!("model {} has fewer than 2 variables", model.id)));
        }
        let top = model.max_production();
        Ok(Self {
            x_var: 0,
            y_var: 1,
            x_range: (0.0, 1.1 * top[0].max(1e-3)),
            y_range: (0.0, 1.1 * top[1].max(1e-3)),
            nx: n,
            ny: n,
            frozen: vec![0.0; model.dim()],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nullcline {
    /// Variable whose derivative vanishes along the curves.
    pub variable: String,
    pub polylines: Vec<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePortrait {
    pub x_variable: String,
    pub y_variable: String,
    pub field: Vec<FieldSample>,
    pub nullclines: [Nullcline; 2],
}

/// Grid edge carrying a crossing: `(i, j, vertical)` starting at node `(i, j)`.
type EdgeId = (usize, usize, bool);

/// Zero contour of a grid function by marching squares. Crossing points sit
/// on cell edges by linear interpolation; ambiguous cells are resolved by the
/// sign of the cell-center average.
fn contour(values: &[Vec<f64>], xs: &[f64], ys: &[f64]) -> Vec<Vec<(f64, f64)>> {
    let (nx, ny) = (xs.len(), ys.len());
    let pos = |v: f64| v >= 0.0;
    let point = |e: EdgeId| -> (f64, f64) {
        let (i, j, vertical) = e;
        let (i2, j2) = if vertical { (i, j + 1) } else { (i + 1, j) };
        let (a, b) = (values[i][j], values[i2][j2]);
        let s = a / (a - b);
        (xs[i] + s * (xs[i2] - xs[i]), ys[j] + s * (ys[j2] - ys[j]))
    };
    let mut links: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    let mut link = |a: EdgeId, b: EdgeId| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let corners = [values[i][j], values[i + 1][j], values[i + 1][j + 1], values[i][j + 1]];
            let edges: [EdgeId; 4] = [(i, j, false), (i + 1, j, true), (i, j + 1, false), (i, j, true)];
            let crossing: Vec<usize> = (0..4).filter(|&e| pos(corners[e]) != pos(corners[(e + 1) % 4])).collect();
            match crossing.len() {
                2 => link(edges[crossing[0]], edges[crossing[1]]),
                4 => {
                    let center = corners.iter().sum::<f64>() / 4.0;
                    // Corner 0 joins the center region or is cut off from it.
                    if pos(center) == pos(corners[0]) {
                        link(edges[0], edges[1]);
                        link(edges[2], edges[3]);
                    } else {
                        link(edges[3], edges[0]);
                        link(edges[1], edges[2]);
                    }
                }
                _ => {}
            }
        }
    }
    let mut visited = BTreeMap::new();
    let mut lines = Vec::new();
    // Open chains start at degree-1 ends; remaining unvisited edges are closed loops.
    let starts: Vec<EdgeId> = links
        .iter()
        .filter(|(_, n)| n.len() == 1)
        .map(|(e, _)| *e)
        .chain(links.keys().copied())
        .collect();
    for s in starts {
        if visited.contains_key(&s) {
            continue;
        }
        let mut chain = vec![s];
        visited.insert(s, ());
        let mut cur = s;
        while let Some(&next) = links[&cur].iter().find(|e| !visited.contains_key(*e)) {
            visited.insert(next, ());
            chain.push(next);
            cur = next;
        }
        if chain.len() > 2 && links[&cur].contains(&s) {
            chain.push(s);
        }
        lines.push(chain.into_iter().map(point).collect());
    }
    lines
}

pub fn phase_portrait(model: &CircuitModel, cfg: &PortraitConfig) -> Result<PhasePortrait> {
    let d = model.dim();
    if cfg.nx < 2 || cfg.ny < 2 {
        return Err(Error::InvalidArgument(format!("grid {}x{} is degenerate", cfg.nx, cfg.ny)));
    }
    let ordered = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1 && r.0 >= 0.0;
    if !ordered(cfg.x_range) || !ordered(cfg.y_range) {
        return Err(Error::InvalidArgument("portrait ranges must be finite, non-negative and increasing".into()));
    }
    if cfg.x_var >= d || cfg.y_var >= d || cfg.x_var == cfg.y_var || cfg.frozen.len() != d {
        return Err(Error::InvalidArgument("portrait variables do not fit the model".into()));
    }
    let axis = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> { (0..n).map(|a| lo + (hi - lo) * a as f64 / (n - 1) as f64).collect() };
    let xs = axis(cfg.x_range, cfg.nx);
    let ys = axis(cfg.y_range, cfg.ny);
    let mut fx = vec![vec![0.0; cfg.ny]; cfg.nx];
    let mut fy = vec![vec![0.0; cfg.ny]; cfg.nx];
    let mut field = Vec::with_capacity(cfg.nx * cfg.ny);
    let mut state = cfg.frozen.clone();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            state[cfg.x_var] = x;
            state[cfg.y_var] = y;
            let r = model.rhs(&state);
            fx[i][j] = r[cfg.x_var];
            fy[i][j] = r[cfg.y_var];
            field.push(FieldSample { x, y, dx: r[cfg.x_var], dy: r[cfg.y_var] });
        }
    }
    Ok(PhasePortrait {
        x_variable: model.variables[cfg.x_var].clone(),
        y_variable: model.variables[cfg.y_var].clone(),
        field,
        nullclines: [
            Nullcline {
                variable: model.variables[cfg.x_var].clone(),
                polylines: contour(&fx, &xs, &ys),
            },
            Nullcline {
                variable: model.variables[cfg.y_var].clone(),
                polylines: contour(&fy, &xs, &ys),
            },
        ],
    })
}

fn segment_intersection(p: (f64, f64), p2: (f64, f64), q: (f64, f64), q2: (f64, f64)) -> Option<(f64, f64)> {
    let r = (p2.0 - p.0, p2.1 - p.1);
    let s = (q2.0 - q.0, q2.1 - q.1);
    let denom = r.0 * s.1 - r.1 * s.0;
    if denom == 0.0 {
        return None;
    }
    let w = (q.0 - p.0, q.1 - p.1);
    let t = (w.0 * s.1 - w.1 * s.0) / denom;
    let u = (w.0 * r.1 - w.1 * r.0) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((p.0 + t * r.0, p.1 + t * r.1))
}

impl PhasePortrait {
    /// Points where the two nullclines cross, merged within `merge` distance.
    pub fn intersections(&self, merge: f64) -> Vec<(f64, f64)> {
        let segs = |n: &Nullcline| -> Vec<((f64, f64), (f64, f64))> {
            n.polylines.iter().flat_map(|l| l.windows(2).map(|w| (w[0], w[1]))).collect()
        };
        let (a, b) = (segs(&self.nullclines[0]), segs(&self.nullclines[1]));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for &(p, p2) in &a {
            for &(q, q2) in &b {
                if let Some(x) = segment_intersection(p, p2, q, q2) {
                    if !out.iter().any(|o| (o.0 - x.0).hypot(o.1 - x.1) < merge) {
                        out.push(x);
                    }
                }
            }
        }
        out
    }

    /// CSV of grid samples with header `x,y,dx,dy`.
    pub fn field_csv(&self) -> String {
        let mut s = String::from("x,y,dx,dy\n");
        for f in &self.field {
            let _ = writeln!(s, "{},{},{},{}", f.x, f.y, f.dx, f.dy);
        }
        s
    }

    /// CSV of nullcline polylines with header `variable,polyline,x,y`.
    pub fn nullcline_csv(&self) -> String {
        let mut s = String::from("variable,polyline,x,y\n");
        for n in &self.nullclines {
            for (k, line) in n.polylines.iter().enumerate() {
                for (x, y) in line {
                    let _ = writeln!(s, "{},{k},{x},{y}", n.variable);
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::catalog::circuit_library;
    use crate::dynamics::fixed_points::{find_fixed_points, FixedPointSearch};

    #[test]
    fn toggle_nullclines_meet_at_fixed_points() {
        let m = circuit_library("M4-5").unwrap();
        let p = phase_portrait(&m, &PortraitConfig::for_model(&m, 201).unwrap()).unwrap();
        let hits = p.intersections(0.02);
        let fps = find_fixed_points(&m, &FixedPointSearch::default()).unwrap();
        assert_eq!(hits.len(), fps.len());
        for fp in &fps {
            assert!(hits.iter().any(|h| (h.0 - fp.point[0]).abs() < 0.01 && (h.1 - fp.point[1]).abs() < 0.01));
        }
    }

    #[test]
    fn coherent_step_input_y_nullcline() {
        let m = circuit_library("S1-S2").unwrap();
        let p = phase_portrait(&m, &PortraitConfig::for_model(&m, 23).unwrap()).unwrap();
        let pts: Vec<_> = p.nullclines[0].polylines.iter().flatten().collect();
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|(y, _)| (y - 1.0).abs() < 1e-12));
    }

    #[test]
    fn degenerate_grid_rejected() {
        let m = circuit_library("M4-5").unwrap();
        let mut cfg = PortraitConfig::for_model(&m, 1).unwrap();
        assert!(phase_portrait(&m, &cfg).is_err());
        cfg.nx = 5;
        cfg.ny = 5;
        cfg.x_range = (1.0, 1.0);
        assert!(phase_portrait(&m, &cfg).is_err());
        assert!(PortraitConfig::for_model(&circuit_library("M3").unwrap(), 5).is_err());
    }

    #[test]
    fn circle_contour_is_closed() {
        let xs: Vec<f64> = (0..41).map(|i| -1.0 + i as f64 * 0.05).collect();
        let v: Vec<Vec<f64>> = xs.iter().map(|&x| xs.iter().map(|&y| x * x + y * y - 0.5).collect()).collect();
        let lines = contour(&v, &xs, &xs);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].first(), lines[0].last());
        assert!(lines[0].iter().all(|(x, y)| ((x * x + y * y).sqrt() - 0.5f64.sqrt()).abs() < 0.01));
    }
}
