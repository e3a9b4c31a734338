//! Reconstruct the spreading tree of an information cascade from a sparse
//! set of time-stamped sightings, under the independent cascade model.

pub mod algorithm;
pub mod bounded;
pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod perfect;
pub mod pipeline;
pub mod samples;
pub mod simulate;
pub mod sp;

pub use error::{Error, Infeasible, InfeasibleReason, Result};
pub use model::{
    CascadeTree, DiffusionGraph, GraphBuilder, NodeId, ObservationMode, PartialObservation,
};
