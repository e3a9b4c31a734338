use std::collections::{BTreeMap, HashMap};

use super::{DiffusionGraph, NodeId};
use crate::error::{Error, Result};

/// A rooted directed tree where every node carries its activation time.
///
/// Activation time always equals depth below the root, so times are derived
/// from the parent map at construction and never stored inconsistently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeTree {
    root: NodeId,
    parent: BTreeMap<NodeId, NodeId>,
    time: BTreeMap<NodeId, u32>,
}

impl CascadeTree {
    pub fn singleton(root: NodeId) -> Self {
        CascadeTree {
            root,
            parent: BTreeMap::new(),
            time: BTreeMap::from([(root, 0)]),
        }
    }

    /// Builds a tree from `(child, parent)` pairs; fails on duplicate
    /// children, a parented root, cycles or nodes that never reach the root.
    pub fn from_parents<I>(root: NodeId, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut parent = BTreeMap::new();
        for (child, p) in pairs {
            if child == root {
                return Err(Error::InvalidTree(format!("root {root} has a parent")));
            }
            if parent.insert(child, p).is_some() {
                return Err(Error::InvalidTree(format!("node {child} has two parents")));
            }
        }
        let mut time: BTreeMap<NodeId, u32> = BTreeMap::from([(root, 0)]);
        let mut chain = Vec::new();
        for &start in parent.keys() {
            if time.contains_key(&start) {
                continue;
            }
            chain.clear();
            let mut cur = start;
            let base = loop {
                if let Some(&t) = time.get(&cur) {
                    break t;
                }
                if chain.len() > parent.len() {
                    return Err(Error::InvalidTree(format!("cycle through node {start}")));
                }
                chain.push(cur);
                cur = match parent.get(&cur) {
                    Some(&p) => p,
                    None => {
                        return Err(Error::InvalidTree(format!(
                            "node {cur} does not reach root {root}"
                        )))
                    }
                };
            };
            for (k, &v) in chain.iter().rev().enumerate() {
                time.insert(v, base + 1 + k as u32);
            }
        }
        Ok(CascadeTree { root, parent, time })
    }

    /// Like [`from_parents`](Self::from_parents) but with stated times, which
    /// must equal the derived depths.
    pub fn from_timed<I>(root: NodeId, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, u32)>,
    {
        let triples: Vec<_> = triples.into_iter().collect();
        let tree = Self::from_parents(root, triples.iter().map(|&(c, p, _)| (c, p)))?;
        for &(c, _, t) in &triples {
            let depth = tree.time[&c];
            if depth != t {
                return Err(Error::InvalidTree(format!(
                    "node {c} has time {t} but depth {depth}"
                )));
            }
        }
        Ok(tree)
    }

    /// Checks that every tree edge exists in `g`.
    pub fn check_in_graph(&self, g: &DiffusionGraph) -> Result<()> {
        for v in self.time.keys() {
            g.check_node(*v)?;
        }
        for (p, c) in self.edges() {
            if !g.has_edge(p, c) {
                return Err(Error::MissingEdge { src: p, dst: c });
            }
        }
        Ok(())
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.time.contains_key(&v)
    }

    pub fn time(&self, v: NodeId) -> Option<u32> {
        self.time.get(&v).copied()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent.get(&v).copied()
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.time.keys().copied()
    }

    /// `(node, time)` pairs in ascending node order.
    pub fn timed_nodes(&self) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.time.iter().map(|(&v, &t)| (v, t))
    }

    /// `(parent, child)` pairs in ascending child order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().map(|(&c, &p)| (p, c))
    }

    pub fn depth(&self) -> u32 {
        self.time.values().copied().max().unwrap_or(0)
    }

    /// Ancestors of `v` from its parent up to the root.
    pub fn ancestors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn children(&self) -> HashMap<NodeId, Vec<NodeId>> {
        let mut ch: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for (p, c) in self.edges() {
            ch.entry(p).or_default().push(c);
        }
        ch
    }

    /// Nodes without children.
    pub fn leaves(&self) -> Vec<NodeId> {
        let ch = self.children();
        self.nodes().filter(|v| !ch.contains_key(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    #[test]
    fn times_follow_depth() {
        let t = CascadeTree::from_parents(n(0), [(n(2), n(1)), (n(1), n(0)), (n(3), n(0))]).unwrap();
        assert_eq!(t.time(n(0)), Some(0));
        assert_eq!(t.time(n(1)), Some(1));
        assert_eq!(t.time(n(2)), Some(2));
        assert_eq!(t.time(n(3)), Some(1));
        assert_eq!(t.ancestors(n(2)), vec![n(1), n(0)]);
        assert_eq!(t.leaves(), vec![n(2), n(3)]);
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn rejects_cycles_and_orphans() {
        assert!(CascadeTree::from_parents(n(0), [(n(1), n(2)), (n(2), n(1))]).is_err());
        assert!(CascadeTree::from_parents(n(0), [(n(1), n(5))]).is_err());
        assert!(CascadeTree::from_parents(n(0), [(n(0), n(1))]).is_err());
        assert!(CascadeTree::from_parents(n(0), [(n(1), n(0)), (n(1), n(0))]).is_err());
    }

    #[test]
    fn stated_times_must_match_depth() {
        assert!(CascadeTree::from_timed(n(0), [(n(1), n(0), 1), (n(2), n(1), 2)]).is_ok());
        assert!(CascadeTree::from_timed(n(0), [(n(1), n(0), 1), (n(2), n(1), 3)]).is_err());
    }
}
