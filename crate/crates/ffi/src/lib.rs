//! C ABI for the `hypermotif` library.
//!
//! Objects cross the boundary as opaque handles (`HmGraph`, `HmCircuit`,
//! `HmTrajectory`) that the caller releases with the matching `*_free`
//! function. Every fallible call returns an [`HmStatus`]; on failure the
//! message is available from [`hm_last_error`] on the same thread.
//! Strings returned through `char **` outputs are owned by the caller and
//! released with [`hm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::OnceLock;

use hypermotif::census::{triad_census, MotifClass, MotifSearchConfig};
use hypermotif::combinatorics::{count_interaction_topologies, enumerate_core_combinations, Motif};
use hypermotif::detect::{detect, DetectConfig};
use hypermotif::dynamics::{
    build_circuit, circuit_library, classify_steady_state, find_fixed_points, integrate, CircuitModel, CircuitTopology,
    ClassifyTolerances, FixedPointSearch, Trajectory,
};
use hypermotif::graph::{load_edge_list, parse_edge_list, ParseOptions};
use hypermotif::nullmodel::NullModelConfig;
use hypermotif::seed::{derive_seed, STREAM_FIXED_POINTS, STREAM_MOTIFS, STREAM_NULL};
use hypermotif::{DirectedGraph, Error, ErrorKind};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Bad argument value, unknown name or non-UTF-8 string.
    InvalidArgument = 2,
    /// Unreadable or malformed input data.
    DataError = 3,
    /// Numerical failure such as a diverging integration.
    NumericError = 4,
    /// The library panicked; this is a bug.
    Panic = 5,
}

/// Directed network.
pub struct HmGraph(DirectedGraph);
/// Hill-kinetics circuit model.
pub struct HmCircuit(CircuitModel);
/// Integrated time course.
pub struct HmTrajectory(Trajectory);

/// Number of triad classes written by [`hm_graph_triad_census`].
pub const HM_TRIAD_CLASSES: usize = 16;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HmStatus {
    match e.kind() {
        ErrorKind::Usage => HmStatus::InvalidArgument,
        ErrorKind::Data => HmStatus::DataError,
        ErrorKind::Numeric => HmStatus::NumericError,
    }
}

enum Fail {
    Null(&'static str),
    Invalid(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HmStatus::Ok,
        Ok(Err(Fail::Null(name))) => {
            set_last_error(format!("argument `{name}` is null"));
            HmStatus::NullPointer
        }
        Ok(Err(Fail::Invalid(m))) => {
            set_last_error(m);
            HmStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            HmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Invalid(format!("argument `{name}` is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn mut_arg<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(name))
}

unsafe fn put<T>(out: *mut *mut T, value: T, name: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(name));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    let c = CString::new(s).map_err(|_| Fail::Invalid("output contains a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Fail> {
    serde_json::to_string(v).map_err(|e| Fail::Lib(Error::Numeric(format!("cannot serialize: {e}"))))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn hm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a whitespace-separated edge list from `path`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_load(path: *const c_char, allow_self_loops: bool, out: *mut *mut HmGraph) -> HmStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let (g, _) = load_edge_list(Path::new(path), &ParseOptions { allow_self_loops })?;
        put(out, HmGraph(g), "out")
    })
}

/// Parses edge-list text held in memory.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_parse(text: *const c_char, allow_self_loops: bool, out: *mut *mut HmGraph) -> HmStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let (g, _) = parse_edge_list(text, &ParseOptions { allow_self_loops })?;
        put(out, HmGraph(g), "out")
    })
}

/// Builds a graph on nodes `0..node_count` from `edge_count` index pairs.
///
/// # Safety
/// `sources` and `targets` must each point to `edge_count` readable values.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_from_edges(
    node_count: usize,
    sources: *const u32,
    targets: *const u32,
    edge_count: usize,
    out: *mut *mut HmGraph,
) -> HmStatus {
    guard(|| {
        let (s, t) = if edge_count == 0 {
            (&[][..], &[][..])
        } else {
            if sources.is_null() {
                return Err(Fail::Null("sources"));
            }
            if targets.is_null() {
                return Err(Fail::Null("targets"));
            }
            (
                std::slice::from_raw_parts(sources, edge_count),
                std::slice::from_raw_parts(targets, edge_count),
            )
        };
        if let Some((u, v)) = s.iter().zip(t).find(|(u, v)| **u as usize >= node_count || **v as usize >= node_count) {
            return Err(Fail::Invalid(format!("edge ({u}, {v}) out of range for {node_count} nodes")));
        }
        let g = DirectedGraph::from_edges(node_count, s.iter().zip(t).map(|(&u, &v)| (u as usize, v as usize)));
        put(out, HmGraph(g), "out")
    })
}

/// # Safety
/// `graph` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_free(graph: *mut HmGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_node_count(graph: *const HmGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// Edge count, self-loops included, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_edge_count(graph: *const HmGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Writes the 16 triad class counts, labeled by [`hm_triad_class_name`],
/// and the self-loop count.
///
/// # Safety
/// `counts` must hold [`HM_TRIAD_CLASSES`] values; `self_loops` may be null.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_triad_census(graph: *const HmGraph, counts: *mut u64, self_loops: *mut u64) -> HmStatus {
    guard(|| {
        let g = ref_arg(graph, "graph")?;
        if counts.is_null() {
            return Err(Fail::Null("counts"));
        }
        let census = triad_census(&g.0);
        let out = std::slice::from_raw_parts_mut(counts, HM_TRIAD_CLASSES);
        for (slot, class) in out.iter_mut().zip(MotifClass::all_triads()) {
            *slot = census.count(class);
        }
        if !self_loops.is_null() {
            *self_loops = census.self_loops;
        }
        Ok(())
    })
}

/// MAN label of triad class `index` (0..16), in the order used by
/// [`hm_graph_triad_census`], as a static string; null when out of range.
#[no_mangle]
pub extern "C" fn hm_triad_class_name(index: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| {
        MotifClass::all_triads()
            .into_iter()
            .map(|c| CString::new(c.label()).expect("labels are ASCII"))
            .collect()
    });
    names.get(index).map_or(ptr::null(), |s| s.as_ptr())
}

/// Runs the full detection pipeline and returns the report as JSON.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_detect_json(
    graph: *const HmGraph,
    ensemble_size: usize,
    alpha: f64,
    seed: u64,
    out: *mut *mut c_char,
) -> HmStatus {
    guard(|| {
        let g = ref_arg(graph, "graph")?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Fail::Invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let cfg = DetectConfig {
            null: NullModelConfig {
                ensemble_size,
                seed: derive_seed(seed, STREAM_NULL),
                ..Default::default()
            },
            motifs: MotifSearchConfig {
                ensemble_size,
                seed: derive_seed(seed, STREAM_MOTIFS),
                ..Default::default()
            },
            alpha,
        };
        let report = detect(&g.0, &cfg)?;
        put_string(out, json(&report)?)
    })
}

/// Number of core topologies joining motifs `a` and `b` by shared nodes.
///
/// # Safety
/// `a` and `b` must be NUL-terminated motif names; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_combination_count(a: *const c_char, b: *const c_char, count: *mut usize) -> HmStatus {
    guard(|| {
        let a: Motif = str_arg(a, "a")?.parse()?;
        let b: Motif = str_arg(b, "b")?.parse()?;
        let n = enumerate_core_combinations(&a, &b)?.len();
        *mut_arg(count, "count")? = n;
        Ok(())
    })
}

/// Core topologies joining `a` and `b`, as a JSON array.
///
/// # Safety
/// `a` and `b` must be NUL-terminated motif names; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_combinations_json(a: *const c_char, b: *const c_char, out: *mut *mut c_char) -> HmStatus {
    guard(|| {
        let a: Motif = str_arg(a, "a")?.parse()?;
        let b: Motif = str_arg(b, "b")?.parse()?;
        put_string(out, json(&enumerate_core_combinations(&a, &b)?)?)
    })
}

/// Number of labeled ways to link node-disjoint motifs of sizes `size_a` and
/// `size_b`, as a decimal string (the value exceeds 64 bits for large sizes).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_interaction_count(size_a: usize, size_b: usize, directed: bool, out: *mut *mut c_char) -> HmStatus {
    guard(|| {
        if size_a == 0 || size_b == 0 {
            return Err(Fail::Invalid("motif sizes must be positive".into()));
        }
        put_string(out, count_interaction_topologies(size_a, size_b, directed).labeled.to_string())
    })
}

/// Circuit from the built-in catalog, such as `"M4-5"`.
///
/// # Safety
/// `id` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_circuit_from_catalog(id: *const c_char, out: *mut *mut HmCircuit) -> HmStatus {
    guard(|| {
        let m = circuit_library(str_arg(id, "id")?)?;
        put(out, HmCircuit(m), "out")
    })
}

/// Circuit from a JSON topology
/// `{"variables": [...], "edges": [{"from", "to", "sign", "n", "k"}], "constants": {...}}`.
///
/// # Safety
/// `topology_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_circuit_from_json(topology_json: *const c_char, out: *mut *mut HmCircuit) -> HmStatus {
    guard(|| {
        let text = str_arg(topology_json, "topology_json")?;
        let topo: CircuitTopology = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        put(out, HmCircuit(build_circuit(&topo)?), "out")
    })
}

/// # Safety
/// `circuit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hm_circuit_free(circuit: *mut HmCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `circuit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hm_circuit_dim(circuit: *const HmCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.dim())
}

/// Sets a Hill parameter such as `"k_xy"` (edge X to Y) or `"n_xx"`.
///
/// # Safety
/// `circuit` must be a live handle; `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hm_circuit_set_parameter(circuit: *mut HmCircuit, name: *const c_char, value: f64) -> HmStatus {
    guard(|| {
        let c = mut_arg(circuit, "circuit")?;
        c.0.set_parameter(str_arg(name, "name")?, value)?;
        Ok(())
    })
}

/// Evaluates the right-hand side at `state`, writing `dim` derivatives.
///
/// # Safety
/// `state` and `derivative` must each hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn hm_circuit_rhs(circuit: *const HmCircuit, state: *const f64, derivative: *mut f64, dim: usize) -> HmStatus {
    guard(|| {
        let c = ref_arg(circuit, "circuit")?;
        if dim != c.0.dim() {
            return Err(Fail::Invalid(format!("circuit has {} variables, got {dim}", c.0.dim())));
        }
        if state.is_null() {
            return Err(Fail::Null("state"));
        }
        if derivative.is_null() {
            return Err(Fail::Null("derivative"));
        }
        let x = std::slice::from_raw_parts(state, dim);
        c.0.rhs_into(x, std::slice::from_raw_parts_mut(derivative, dim));
        Ok(())
    })
}

/// Fixed points with stability labels and eigenvalues, as a JSON array.
///
/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_circuit_fixed_points_json(circuit: *const HmCircuit, seed: u64, out: *mut *mut c_char) -> HmStatus {
    guard(|| {
        let c = ref_arg(circuit, "circuit")?;
        let search = FixedPointSearch {
            seed: derive_seed(seed, STREAM_FIXED_POINTS),
            ..Default::default()
        };
        put_string(out, json(&find_fixed_points(&c.0, &search)?)?)
    })
}

/// Integrates with fixed-step RK4 from `initial` over `[0, horizon]`.
///
/// # Safety
/// `circuit` must be a live handle; `initial` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn hm_simulate(
    circuit: *const HmCircuit,
    initial: *const f64,
    dim: usize,
    horizon: f64,
    step: f64,
    out: *mut *mut HmTrajectory,
) -> HmStatus {
    guard(|| {
        let c = ref_arg(circuit, "circuit")?;
        if initial.is_null() && dim > 0 {
            return Err(Fail::Null("initial"));
        }
        let x0 = if dim == 0 { &[][..] } else { std::slice::from_raw_parts(initial, dim) };
        put(out, HmTrajectory(integrate(&c.0, x0, horizon, step)?), "out")
    })
}

/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hm_trajectory_free(trajectory: *mut HmTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Number of stored time points (steps + 1), or 0 for a null handle.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hm_trajectory_len(trajectory: *const HmTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.0.times.len())
}

/// Copies the state at time point `index` into `state` (`dim` values) and
/// its time into `time` when non-null.
///
/// # Safety
/// `trajectory` must be a live handle; `state` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn hm_trajectory_state(
    trajectory: *const HmTrajectory,
    index: usize,
    time: *mut f64,
    state: *mut f64,
    dim: usize,
) -> HmStatus {
    guard(|| {
        let t = ref_arg(trajectory, "trajectory")?;
        let s = t
            .0
            .states
            .get(index)
            .ok_or_else(|| Fail::Invalid(format!("index {index} out of range for {} points", t.0.times.len())))?;
        if dim != s.len() {
            return Err(Fail::Invalid(format!("trajectory has {} variables, got {dim}", s.len())));
        }
        if state.is_null() {
            return Err(Fail::Null("state"));
        }
        std::slice::from_raw_parts_mut(state, dim).copy_from_slice(s);
        if !time.is_null() {
            *time = t.0.times[index];
        }
        Ok(())
    })
}

/// Trajectory as CSV with header `t,<variables>`.
///
/// # Safety
/// `trajectory` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_trajectory_csv(trajectory: *const HmTrajectory, out: *mut *mut c_char) -> HmStatus {
    guard(|| put_string(out, ref_arg(trajectory, "trajectory")?.0.to_csv()))
}

/// Steady-state classification of a trajectory with default tolerances, as JSON.
///
/// # Safety
/// Both handles must be live and `trajectory` must come from `circuit`.
#[no_mangle]
pub unsafe extern "C" fn hm_trajectory_classify_json(
    circuit: *const HmCircuit,
    trajectory: *const HmTrajectory,
    out: *mut *mut c_char,
) -> HmStatus {
    guard(|| {
        let c = ref_arg(circuit, "circuit")?;
        let t = ref_arg(trajectory, "trajectory")?;
        let class = classify_steady_state(&c.0, &t.0, &ClassifyTolerances::default())?;
        put_string(out, json(&class)?)
    })
}
