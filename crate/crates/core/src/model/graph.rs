use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Dense node identifier, an index into the graph's node table.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index exceeds u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A directed edge carrying the probability that `src` influences `dst`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub prob: f64,
}

impl Edge {
    /// `-ln f(u, v)`, the edge's contribution to the negated log-likelihood.
    #[inline]
    pub fn weight(&self) -> f64 {
        -self.prob.ln()
    }
}

/// Directed diffusion graph `G = (V, E, f)`.
///
/// Nodes are dense ids `0..n` with a label table. Every edge probability lies
/// in `(0, 1]`; there are no self-loops and no parallel edges. Adjacency lists
/// are sorted by neighbor id, so iteration order is deterministic.
#[derive(Clone, Debug)]
pub struct DiffusionGraph {
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    edge_index: HashMap<(NodeId, NodeId), u32>,
}

impl DiffusionGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    /// Graph over nodes `0..node_count` labelled by their decimal id.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut b = GraphBuilder::with_numbered_nodes(node_count);
        for (u, v, p) in edges {
            b.add_edge(NodeId::from(u), NodeId::from(v), p)?;
        }
        Ok(b.build())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId::from)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.labels.len()
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-edges of `u` in ascending destination order.
    pub fn out_edges(&self, u: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.out_adj[u.index()]
            .iter()
            .map(move |&e| &self.edges[e as usize])
    }

    /// In-edges of `v` in ascending source order.
    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.in_adj[v.index()]
            .iter()
            .map(move |&e| &self.edges[e as usize])
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_adj[u.index()].len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_adj[v.index()].len()
    }

    pub fn prob(&self, src: NodeId, dst: NodeId) -> Option<f64> {
        self.edge_index
            .get(&(src, dst))
            .map(|&e| self.edges[e as usize].prob)
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.edge_index.contains_key(&(src, dst))
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    /// Smallest edge probability, `None` for an edgeless graph.
    pub fn f_min(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.prob).reduce(f64::min)
    }

    /// Largest edge probability, `None` for an edgeless graph.
    pub fn f_max(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.prob).reduce(f64::max)
    }

    /// Same topology with every probability replaced by `f(edge)`.
    pub fn map_probs(&self, mut f: impl FnMut(&Edge) -> f64) -> Result<Self> {
        let mut b = GraphBuilder::default();
        for l in &self.labels {
            b.intern(l);
        }
        for e in &self.edges {
            b.add_edge(e.src, e.dst, f(e))?;
        }
        Ok(b.build())
    }

    /// A builder pre-loaded with this graph, for extending it.
    pub fn to_builder(&self) -> GraphBuilder {
        GraphBuilder {
            labels: self.labels.clone(),
            label_index: self.label_index.clone(),
            edges: self.edges.clone(),
            edge_index: self.edge_index.clone(),
        }
    }
}

/// Incremental construction of a [`DiffusionGraph`], enforcing its invariants.
#[derive(Default, Debug)]
pub struct GraphBuilder {
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    edge_index: HashMap<(NodeId, NodeId), u32>,
}

impl GraphBuilder {
    pub fn with_numbered_nodes(n: usize) -> Self {
        let mut b = GraphBuilder::default();
        for i in 0..n {
            b.intern(&i.to_string());
        }
        b
    }

    /// Adds a node with a fresh label; duplicate labels are rejected.
    pub fn add_node(&mut self, label: impl Into<String>) -> Result<NodeId> {
        let label = label.into();
        if self.label_index.contains_key(&label) {
            return Err(Error::Contract(format!("duplicate node label {label:?}")));
        }
        Ok(self.intern(&label))
    }

    /// Id for `label`, creating the node on first sight.
    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.label_index.get(label) {
            return id;
        }
        let id = NodeId::from(self.labels.len());
        self.labels.push(label.to_owned());
        self.label_index.insert(label.to_owned(), id);
        id
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn add_edge(&mut self, src: NodeId, dst: NodeId, prob: f64) -> Result<()> {
        let n = self.labels.len();
        for v in [src, dst] {
            if v.index() >= n {
                return Err(Error::UnknownNode(v));
            }
        }
        if src == dst {
            return Err(Error::SelfLoop(src));
        }
        // NaN fails both comparisons.
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(Error::InvalidProbability { src, dst, prob });
        }
        if self.edge_index.contains_key(&(src, dst)) {
            return Err(Error::DuplicateEdge { src, dst });
        }
        self.edge_index.insert((src, dst), self.edges.len() as u32);
        self.edges.push(Edge { src, dst, prob });
        Ok(())
    }

    pub fn build(self) -> DiffusionGraph {
        let n = self.labels.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out_adj[e.src.index()].push(i as u32);
            in_adj[e.dst.index()].push(i as u32);
        }
        let edges = &self.edges;
        for list in &mut out_adj {
            list.sort_by_key(|&e| edges[e as usize].dst);
        }
        for list in &mut in_adj {
            list.sort_by_key(|&e| edges[e as usize].src);
        }
        DiffusionGraph {
            labels: self.labels,
            label_index: self.label_index,
            edges: self.edges,
            out_adj,
            in_adj,
            edge_index: self.edge_index,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        let mut b = GraphBuilder::with_numbered_nodes(2);
        let (a, c) = (NodeId(0), NodeId(1));
        assert!(matches!(b.add_edge(a, a, 0.5), Err(Error::SelfLoop(_))));
        assert!(matches!(
            b.add_edge(a, c, 0.0),
            Err(Error::InvalidProbability { .. })
        ));
        assert!(matches!(
            b.add_edge(a, c, 1.5),
            Err(Error::InvalidProbability { .. })
        ));
        assert!(matches!(
            b.add_edge(a, c, f64::NAN),
            Err(Error::InvalidProbability { .. })
        ));
        b.add_edge(a, c, 1.0).unwrap();
        assert!(matches!(
            b.add_edge(a, c, 0.3),
            Err(Error::DuplicateEdge { .. })
        ));
        assert!(matches!(
            b.add_edge(a, NodeId(7), 0.3),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn adjacency_indexes_agree() {
        let g = DiffusionGraph::from_edges(
            4,
            [(0, 1, 0.5), (0, 2, 0.8), (1, 3, 0.9), (2, 3, 0.1), (3, 0, 0.2)],
        )
        .unwrap();
        let mut fwd: Vec<_> = g
            .nodes()
            .flat_map(|u| g.out_edges(u).map(|e| (e.src, e.dst)))
            .collect();
        let mut rev: Vec<_> = g
            .nodes()
            .flat_map(|v| g.in_edges(v).map(|e| (e.src, e.dst)))
            .collect();
        fwd.sort();
        rev.sort();
        assert_eq!(fwd, rev);
        assert_eq!(fwd.len(), g.edge_count());
        assert_eq!(g.f_min(), Some(0.1));
        assert_eq!(g.f_max(), Some(0.9));
        assert_eq!(g.prob(NodeId(1), NodeId(3)), Some(0.9));
        assert_eq!(g.prob(NodeId(3), NodeId(1)), None);
    }
}
