//! Network hyper-motifs: detection of enriched motif combinations in directed
//! networks, enumeration of the ways two motifs can combine or interact, and
//! Hill-kinetics simulation of the resulting circuits.

pub mod census;
pub mod cli;
pub mod combinatorics;
pub mod detect;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod nullmodel;
pub mod seed;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
pub use graph::DirectedGraph;
