//! Shared domain types: the diffusion graph, cascade trees, partial
//! observations, hop distances, consistency checks and likelihood.

mod bfs;
mod consistency;
mod graph;
mod observation;
mod tree;

pub use bfs::{bfs_levels, diameter, reverse_bfs_levels, Levels};
pub use consistency::{
    check_bounded_consistent, check_perfect_consistent, check_sp_consistent, tree_cost,
    tree_log_likelihood,
};
pub use graph::{DiffusionGraph, Edge, GraphBuilder, NodeId};
pub use observation::{ObservationMode, PartialObservation};
pub use tree::CascadeTree;
