//! Exhaustive search over consistent trees on small graphs.
//!
//! Serves as ground truth for the heuristics: optimal trees, feasibility, and
//! the decision form "is there a consistent tree with cost at most B".
//!
//! Trees are enumerated top-down one depth at a time: every node outside the
//! tree that has an in-edge from the current deepest level either joins at the
//! next depth through one of those edges or waits. That visits each tree
//! exactly once. Only *minimal* trees are visited, those whose leaves are all
//! observed (or the bare source). Dropping an unobserved leaf keeps a tree
//! consistent and never raises its cost, so optima are always minimal.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{bfs_levels, tree_cost, CascadeTree, DiffusionGraph, NodeId, PartialObservation};

/// Default limit on graph size.
pub const ORACLE_NODE_CAP: usize = 12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TreeFamily {
    /// Observed depth at most the observed time.
    Bounded,
    /// Observed depth equal to the observed time.
    Perfect,
    /// Perfect, with every observed time equal to the hop distance.
    ShortestPath,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Objective {
    /// Minimize the negated log-likelihood.
    MaxLikelihood,
    /// Minimize the edge count.
    MinSize,
    /// Any consistent tree.
    Feasibility,
    /// Is there a consistent tree with negated log-likelihood at most this bound?
    Decision(f64),
}

#[derive(Clone, Debug)]
pub struct OracleQuery<'a> {
    pub graph: &'a DiffusionGraph,
    pub observation: &'a PartialObservation,
    pub family: TreeFamily,
    pub objective: Objective,
    pub node_cap: usize,
}

impl<'a> OracleQuery<'a> {
    pub fn new(
        graph: &'a DiffusionGraph,
        observation: &'a PartialObservation,
        family: TreeFamily,
        objective: Objective,
    ) -> Self {
        OracleQuery {
            graph,
            observation,
            family,
            objective,
            node_cap: ORACLE_NODE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleAnswer {
    /// Best tree; ties go to fewer edges, then the smaller sorted edge list.
    Optimal { tree: CascadeTree, value: f64 },
    Feasible(CascadeTree),
    Infeasible,
    Decision(bool),
}

impl OracleAnswer {
    pub fn tree(&self) -> Option<&CascadeTree> {
        match self {
            OracleAnswer::Optimal { tree, .. } | OracleAnswer::Feasible(tree) => Some(tree),
            _ => None,
        }
    }
}

pub fn oracle_solve(q: &OracleQuery<'_>) -> Result<OracleAnswer> {
    let g = q.graph;
    match q.objective {
        Objective::Feasibility => {
            let mut found = None;
            search(q, false, |t, _| {
                found = Some(t.clone());
                Flow::Stop
            })?;
            Ok(found.map_or(OracleAnswer::Infeasible, OracleAnswer::Feasible))
        }
        Objective::MaxLikelihood | Objective::MinSize | Objective::Decision(_) => {
            let unit = q.objective == Objective::MinSize;
            let value = |t: &CascadeTree| {
                if unit {
                    t.edge_count() as f64
                } else {
                    tree_cost(g, t).expect("enumerated trees use graph edges")
                }
            };
            let mut best: Option<(f64, Vec<(NodeId, NodeId)>, CascadeTree)> = None;
            search(q, unit, |t, _| {
                let v = value(t);
                let key = sorted_edges(t);
                let better = match &best {
                    None => true,
                    Some((bv, bk, _)) => {
                        v.total_cmp(bv)
                            .then(key.len().cmp(&bk.len()))
                            .then_with(|| key.cmp(bk))
                            == Ordering::Less
                    }
                };
                if better {
                    best = Some((v, key, t.clone()));
                }
                Flow::Continue {
                    prune_above: best.as_ref().map_or(f64::INFINITY, |b| b.0),
                }
            })?;
            Ok(match (q.objective, best) {
                (Objective::Decision(bound), best) => {
                    OracleAnswer::Decision(best.is_some_and(|b| b.0 <= bound))
                }
                (_, Some((value, _, tree))) => OracleAnswer::Optimal { tree, value },
                (_, None) => OracleAnswer::Infeasible,
            })
        }
    }
}

/// Calls `visit` on every minimal consistent tree and returns how many there were.
pub fn for_each_minimal_tree(
    g: &DiffusionGraph,
    x: &PartialObservation,
    family: TreeFamily,
    node_cap: usize,
    mut visit: impl FnMut(&CascadeTree),
) -> Result<usize> {
    let q = OracleQuery {
        graph: g,
        observation: x,
        family,
        objective: Objective::Feasibility,
        node_cap,
    };
    let mut count = 0;
    search(&q, false, |t, _| {
        count += 1;
        visit(t);
        Flow::Continue {
            prune_above: f64::INFINITY,
        }
    })?;
    Ok(count)
}

fn sorted_edges(t: &CascadeTree) -> Vec<(NodeId, NodeId)> {
    let mut e: Vec<_> = t.edges().collect();
    e.sort();
    e
}

enum Flow {
    Continue { prune_above: f64 },
    Stop,
}

const NOT_IN_TREE: u32 = u32::MAX;

struct Search<'a, F> {
    g: &'a DiffusionGraph,
    observed: Vec<(NodeId, u32)>,
    required: Vec<Option<u32>>,
    exact_depth: bool,
    t_max: u32,
    unit: bool,
    min_in: Vec<f64>,
    depth: Vec<u32>,
    parent: Vec<Option<NodeId>>,
    cost: f64,
    prune_above: f64,
    stopped: bool,
    visit: F,
}

fn search<F>(q: &OracleQuery<'_>, unit: bool, visit: F) -> Result<()>
where
    F: FnMut(&CascadeTree, f64) -> Flow,
{
    let g = q.graph;
    let x = q.observation;
    if g.node_count() > q.node_cap {
        return Err(Error::OracleCapExceeded {
            nodes: g.node_count(),
            cap: q.node_cap,
        });
    }
    x.check_in_graph(g)?;
    if q.family == TreeFamily::ShortestPath {
        let levels = bfs_levels(g, x.source(), None)?;
        if x.points().any(|(v, t)| levels.get(v) != Some(t)) {
            return Ok(());
        }
    }

    let n = g.node_count();
    let mut required = vec![None; n];
    for (v, t) in x.points() {
        required[v.index()] = Some(t);
    }
    let min_in = g
        .nodes()
        .map(|v| {
            if unit {
                if g.in_degree(v) > 0 { 1.0 } else { f64::INFINITY }
            } else {
                g.in_edges(v).map(|e| e.weight()).fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    let s = x.source();
    let mut st = Search {
        g,
        observed: x.by_time(),
        required,
        exact_depth: q.family != TreeFamily::Bounded,
        t_max: x.t_max(),
        unit,
        min_in,
        depth: vec![NOT_IN_TREE; n],
        parent: vec![None; n],
        cost: 0.0,
        prune_above: f64::INFINITY,
        stopped: false,
        visit,
    };
    st.depth[s.index()] = 0;
    st.level(vec![s], 0);
    Ok(())
}

impl<F> Search<'_, F>
where
    F: FnMut(&CascadeTree, f64) -> Flow,
{
    fn lower_bound(&self) -> f64 {
        self.cost
            + self
                .observed
                .iter()
                .filter(|(v, _)| self.depth[v.index()] == NOT_IN_TREE)
                .map(|(v, _)| self.min_in[v.index()])
                .sum::<f64>()
    }

    /// Whether some observed node still outside the tree is due deeper than `d`.
    fn pending_deeper_than(&self, d: u32) -> bool {
        self.observed
            .iter()
            .any(|&(v, t)| t > d && self.depth[v.index()] == NOT_IN_TREE)
    }

    fn level(&mut self, frontier: Vec<NodeId>, d: u32) {
        if d == self.t_max {
            self.finish();
            return;
        }
        let mut cands: Vec<NodeId> = frontier
            .iter()
            .flat_map(|&u| self.g.out_edges(u).map(|e| e.dst))
            .filter(|w| self.depth[w.index()] == NOT_IN_TREE)
            .collect();
        cands.sort_unstable();
        cands.dedup();
        let mut attached = Vec::new();
        self.decide(&cands, 0, d, &mut attached);
    }

    fn decide(&mut self, cands: &[NodeId], i: usize, d: u32, attached: &mut Vec<NodeId>) {
        if self.stopped || self.lower_bound() > self.prune_above + 1e-12 {
            return;
        }
        let next = d + 1;
        if i == cands.len() {
            // Everything due by `next` must be in place now.
            let due_missing = self.observed.iter().any(|&(v, t)| {
                let at = self.depth[v.index()];
                t <= next && (at == NOT_IN_TREE || (self.exact_depth && at != t))
            });
            if due_missing {
                return;
            }
            if attached.is_empty() {
                self.finish();
            } else {
                self.level(attached.clone(), next);
            }
            return;
        }
        let w = cands[i];
        let (may_attach, may_wait) = match self.required[w.index()] {
            Some(t) if self.exact_depth => (t == next, t != next),
            Some(t) => (t >= next, t > next),
            None => (next < self.t_max && self.pending_deeper_than(next), true),
        };
        if may_attach {
            let parents: Vec<(NodeId, f64)> = self
                .g
                .in_edges(w)
                .filter(|e| self.depth[e.src.index()] == d)
                .map(|e| (e.src, if self.unit { 1.0 } else { e.weight() }))
                .collect();
            for (p, c) in parents {
                self.depth[w.index()] = next;
                self.parent[w.index()] = Some(p);
                self.cost += c;
                attached.push(w);
                self.decide(cands, i + 1, d, attached);
                attached.pop();
                self.cost -= c;
                self.parent[w.index()] = None;
                self.depth[w.index()] = NOT_IN_TREE;
                if self.stopped {
                    return;
                }
            }
        }
        if may_wait {
            self.decide(cands, i + 1, d, attached);
        }
    }

    /// The tree is complete; emit it if every leaf is observed.
    fn finish(&mut self) {
        if self.observed.iter().any(|(v, _)| self.depth[v.index()] == NOT_IN_TREE) {
            return;
        }
        let mut has_child = vec![false; self.parent.len()];
        for p in self.parent.iter().flatten() {
            has_child[p.index()] = true;
        }
        let minimal = (0..self.parent.len()).all(|i| {
            self.parent[i].is_none() || has_child[i] || self.required[i].is_some()
        });
        if !minimal {
            return;
        }
        let root = self.observed[0].0;
        let pairs = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (NodeId::from(i), p)));
        let tree = CascadeTree::from_parents(root, pairs).expect("enumeration builds trees");
        match (self.visit)(&tree, self.cost) {
            Flow::Stop => self.stopped = true,
            Flow::Continue { prune_above } => self.prune_above = prune_above,
        }
    }
}
