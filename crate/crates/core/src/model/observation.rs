use std::collections::BTreeMap;

use super::{DiffusionGraph, NodeId};
use crate::error::{Error, Result};

/// How observed times are read.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ObservationMode {
    /// Node became active exactly at the stated step (perfect trees).
    Exact,
    /// Node became active at or before the stated step (bounded trees).
    By,
}

impl ObservationMode {
    pub fn name(self) -> &'static str {
        match self {
            ObservationMode::Exact => "exact",
            ObservationMode::By => "by",
        }
    }
}

impl std::str::FromStr for ObservationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "at" => Ok(ObservationMode::Exact),
            "by" => Ok(ObservationMode::By),
            other => Err(Error::Contract(format!(
                "unknown observation mode {other:?} (expected exact or by)"
            ))),
        }
    }
}

/// Partial observation `X`: `(node, time)` points including `(source, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialObservation {
    source: NodeId,
    points: BTreeMap<NodeId, u32>,
    mode: ObservationMode,
}

impl PartialObservation {
    /// `points` must contain `(source, 0)`; no node may appear twice and no
    /// other node may be observed at time 0.
    pub fn new<I>(source: NodeId, points: I, mode: ObservationMode) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, u32)>,
    {
        let mut map = BTreeMap::new();
        for (v, t) in points {
            if map.insert(v, t).is_some() {
                return Err(Error::InvalidObservation(format!(
                    "node {v} observed more than once"
                )));
            }
            if t == 0 && v != source {
                return Err(Error::InvalidObservation(format!(
                    "node {v} observed at time 0 but is not the source"
                )));
            }
        }
        match map.get(&source) {
            Some(0) => {}
            Some(t) => {
                return Err(Error::InvalidObservation(format!(
                    "source {source} observed at time {t}, expected 0"
                )))
            }
            None => {
                return Err(Error::InvalidObservation(format!(
                    "source {source} missing from observation"
                )))
            }
        }
        Ok(PartialObservation {
            source,
            points: map,
            mode,
        })
    }

    /// Observation consisting of the source alone.
    pub fn source_only(source: NodeId, mode: ObservationMode) -> Self {
        PartialObservation {
            source,
            points: BTreeMap::from([(source, 0)]),
            mode,
        }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn mode(&self) -> ObservationMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: ObservationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn t_max(&self) -> u32 {
        self.points.values().copied().max().unwrap_or(0)
    }

    pub fn time_of(&self, v: NodeId) -> Option<u32> {
        self.points.get(&v).copied()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.points.contains_key(&v)
    }

    /// Points in ascending node order.
    pub fn points(&self) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.points.iter().map(|(&v, &t)| (v, t))
    }

    /// Points in ascending `(time, node)` order.
    pub fn by_time(&self) -> Vec<(NodeId, u32)> {
        let mut pts: Vec<_> = self.points().collect();
        pts.sort_by_key(|&(v, t)| (t, v));
        pts
    }

    pub fn check_in_graph(&self, g: &DiffusionGraph) -> Result<()> {
        self.points.keys().try_for_each(|&v| g.check_node(v))
    }

    pub(crate) fn require_mode(&self, mode: ObservationMode, who: &str) -> Result<()> {
        if self.mode == mode {
            Ok(())
        } else {
            Err(Error::Contract(format!(
                "{who} needs a {:?}-mode observation, got {:?}",
                mode.name(),
                self.mode.name()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enforces_invariants() {
        let s = NodeId(0);
        let by = ObservationMode::By;
        assert!(PartialObservation::new(s, [(s, 0), (NodeId(1), 2)], by).is_ok());
        assert!(PartialObservation::new(s, [(NodeId(1), 2)], by).is_err());
        assert!(PartialObservation::new(s, [(s, 1)], by).is_err());
        assert!(PartialObservation::new(s, [(s, 0), (NodeId(1), 0)], by).is_err());
        assert!(PartialObservation::new(s, [(s, 0), (NodeId(1), 2), (NodeId(1), 3)], by).is_err());
    }

    #[test]
    fn t_max_and_order() {
        let s = NodeId(0);
        let x = PartialObservation::new(
            s,
            [(s, 0), (NodeId(4), 1), (NodeId(2), 3), (NodeId(3), 1)],
            ObservationMode::Exact,
        )
        .unwrap();
        assert_eq!(x.t_max(), 3);
        assert_eq!(
            x.by_time(),
            vec![(s, 0), (NodeId(3), 1), (NodeId(4), 1), (NodeId(2), 3)]
        );
    }
}
