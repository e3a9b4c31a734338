//! Reading and writing graphs, observations, trees and reports.

mod formats;
mod report;

pub use formats::{
    format_graph, format_observation, format_tree, parse_graph, parse_observation, parse_tree,
    read_graph, read_observation, read_tree, write_graph, write_observation, write_tree,
};
pub(crate) use formats::write_file;
pub use report::{format_metrics, format_run, format_summary};
