//! Scoring inferred trees against the true cascade.
//!
//! All metrics are ratios of counts. A corpus is scored by summing numerators
//! and denominators over cascades before dividing (micro-averaging), so large
//! cascades weigh more than small ones.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{CascadeTree, NodeId, PartialObservation};

/// How `prec_v` decides that a correctly recovered node is also correctly placed.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum PlacementRule {
    /// Same depth in both trees.
    #[default]
    Depth,
    /// Same chain of ancestors in both trees.
    Ancestors,
}

/// A count ratio that may be undefined (zero denominator).
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }

    pub fn value(self) -> Option<f64> {
        (self.den > 0).then(|| self.num as f64 / self.den as f64)
    }
}

impl std::ops::Add for Ratio {
    type Output = Ratio;
    fn add(self, o: Ratio) -> Ratio {
        Ratio::new(self.num + o.num, self.den + o.den)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Per-cascade metric components.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct CascadeScore {
    /// Inferred hidden nodes that are truly in the cascade.
    pub prec: Ratio,
    /// Hidden cascade nodes that were recovered.
    pub rec: Ratio,
    /// Correctly recovered hidden nodes that are also correctly placed.
    pub prec_v: Ratio,
    /// Inferred edges that are true edges.
    pub prec_e: Ratio,
    /// Inference produced no tree.
    pub failed: bool,
}

impl CascadeScore {
    /// Score for a cascade where inference produced no tree: nothing recovered.
    pub fn failed(truth: &CascadeTree, x: &PartialObservation) -> Self {
        let hidden = truth.nodes().filter(|&v| !x.contains(v)).count() as u64;
        CascadeScore {
            rec: Ratio::new(0, hidden),
            failed: true,
            ..CascadeScore::default()
        }
    }
}

pub fn evaluate(
    truth: &CascadeTree,
    inferred: &CascadeTree,
    x: &PartialObservation,
) -> Result<CascadeScore> {
    evaluate_with(truth, inferred, x, PlacementRule::Depth)
}

pub fn evaluate_with(
    truth: &CascadeTree,
    inferred: &CascadeTree,
    x: &PartialObservation,
    rule: PlacementRule,
) -> Result<CascadeScore> {
    if truth.root() != inferred.root() {
        return Err(Error::Contract(format!(
            "cannot compare trees rooted at {} and {}",
            truth.root(),
            inferred.root()
        )));
    }
    let hidden_inferred: Vec<NodeId> = inferred.nodes().filter(|&v| !x.contains(v)).collect();
    let hidden_truth = truth.nodes().filter(|&v| !x.contains(v)).count() as u64;
    let correct: Vec<NodeId> = hidden_inferred
        .iter()
        .copied()
        .filter(|&v| truth.contains(v))
        .collect();
    let placed = correct
        .iter()
        .filter(|&&v| match rule {
            PlacementRule::Depth => truth.time(v) == inferred.time(v),
            PlacementRule::Ancestors => truth.ancestors(v) == inferred.ancestors(v),
        })
        .count() as u64;
    let true_edges: HashSet<(NodeId, NodeId)> = truth.edges().collect();
    let shared_edges = inferred.edges().filter(|e| true_edges.contains(e)).count() as u64;

    let k = correct.len() as u64;
    Ok(CascadeScore {
        prec: Ratio::new(k, hidden_inferred.len() as u64),
        rec: Ratio::new(k, hidden_truth),
        prec_v: Ratio::new(placed, k),
        prec_e: Ratio::new(shared_edges, inferred.edge_count() as u64),
        failed: false,
    })
}

/// Micro-averaged metrics over a corpus.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct EvalReport {
    pub totals: CascadeScore,
    pub cascades: usize,
    pub failed: usize,
}

impl EvalReport {
    pub fn prec(&self) -> Option<f64> {
        self.totals.prec.value()
    }

    pub fn rec(&self) -> Option<f64> {
        self.totals.rec.value()
    }

    pub fn prec_v(&self) -> Option<f64> {
        self.totals.prec_v.value()
    }

    pub fn prec_e(&self) -> Option<f64> {
        self.totals.prec_e.value()
    }
}

pub fn aggregate<'a>(scores: impl IntoIterator<Item = &'a CascadeScore>) -> EvalReport {
    let mut r = EvalReport::default();
    for s in scores {
        r.totals.prec = r.totals.prec + s.prec;
        r.totals.rec = r.totals.rec + s.rec;
        r.totals.prec_v = r.totals.prec_v + s.prec_v;
        r.totals.prec_e = r.totals.prec_e + s.prec_e;
        r.cascades += 1;
        r.failed += usize::from(s.failed);
    }
    r
}
