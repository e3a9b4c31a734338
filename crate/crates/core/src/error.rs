use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::model::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why an observation admits no tree from a given algorithm.
#[derive(Debug, Clone, PartialEq)]
pub enum InfeasibleReason {
    /// The observed node cannot be reached from the source at all.
    Unreachable,
    /// Hop distance from the source exceeds the observed time.
    TooFar { dist: u32 },
    /// No walk of exactly the observed length reaches the node inside the backbone.
    NoExactLengthWalk,
    /// Shortest-path trees need observed time equal to the hop distance.
    NotShortestPath { dist: u32 },
    /// A per-level forest instance had a required node without any candidate parent.
    LevelUncoverable,
    /// Level-by-level construction did not produce a single consistent tree.
    NotATree,
    /// The exhaustive search found no consistent tree.
    NoConsistentTree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Infeasible {
    pub node: NodeId,
    pub time: u32,
    pub reason: InfeasibleReason,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {} observed at time {}: ", self.node, self.time)?;
        match &self.reason {
            InfeasibleReason::Unreachable => write!(f, "unreachable from the source"),
            InfeasibleReason::TooFar { dist } => write!(f, "distance {dist} exceeds observed time"),
            InfeasibleReason::NoExactLengthWalk => {
                write!(f, "no walk of exactly the observed length")
            }
            InfeasibleReason::NotShortestPath { dist } => {
                write!(f, "observed time differs from distance {dist}")
            }
            InfeasibleReason::LevelUncoverable => write!(f, "no candidate parent at this level"),
            InfeasibleReason::NotATree => write!(f, "construction did not yield a tree"),
            InfeasibleReason::NoConsistentTree => write!(f, "no consistent tree exists"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown node label {0:?}")]
    UnknownLabel(String),
    #[error("edge {src} -> {dst}: probability {prob} outside (0, 1]")]
    InvalidProbability { src: NodeId, dst: NodeId, prob: f64 },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: NodeId, dst: NodeId },
    #[error("tree edge {src} -> {dst} is not an edge of the graph")]
    MissingEdge { src: NodeId, dst: NodeId },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid observation: {0}")]
    InvalidObservation(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("infeasible: {0}")]
    Infeasible(Infeasible),
    #[error("exhaustive search refused: graph has {nodes} nodes, cap is {cap}")]
    OracleCapExceeded { nodes: usize, cap: usize },
    #[error("simulation gave up after {attempts} attempts without reaching {min_nodes} nodes")]
    Generation { attempts: u32, min_nodes: usize },
    #[error("{}line {line}: {msg}", path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        msg: String,
    },
    #[error("cascade {index}: {source}")]
    Cascade {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn infeasible(node: NodeId, time: u32, reason: InfeasibleReason) -> Self {
        Error::Infeasible(Infeasible { node, time, reason })
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn with_path(self, path: &std::path::Path) -> Self {
        match self {
            Error::Parse { line, msg, .. } => Error::Parse {
                path: Some(path.to_path_buf()),
                line,
                msg,
            },
            other => other,
        }
    }

    /// True when the error reports an infeasible observation rather than bad input.
    pub fn is_infeasible(&self) -> bool {
        match self {
            Error::Infeasible(_) => true,
            Error::Cascade { source, .. } => source.is_infeasible(),
            _ => false,
        }
    }
}
