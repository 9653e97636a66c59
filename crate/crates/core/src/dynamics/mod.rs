//! Hill-kinetics circuit models: catalog, integration, fixed points,
//! trajectory classification and phase portraits.
//!
//! Every variable follows `v' = Π factors − v`, where a factor is a constant
//! production rate or a Hill input function of another variable.

pub mod analysis;
pub mod catalog;
pub mod fixed_points;
pub mod integrate;
pub mod model;
pub mod portrait;

pub use analysis::{
    classify_steady_state, phase_relation, pulse_metrics, ClassifyTolerances, PhaseRelation, PulseMetrics, Relation,
    SteadyState, SteadyStateClass, VariableState,
};
pub use catalog::{catalog, catalog_ids, catalog_listing, circuit_library, CatalogEntry};
pub use fixed_points::{find_fixed_points, FixedPoint, FixedPointSearch, Stability};
pub use integrate::{integrate, integrate_many, parse_initial, Trajectory, DEFAULT_HORIZON, DEFAULT_STEP};
pub use model::{build_circuit, hill, CircuitEdge, CircuitModel, CircuitTopology, Factor};
pub use portrait::{phase_portrait, PhasePortrait, PortraitConfig};
