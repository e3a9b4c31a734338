use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::Result;
use crate::model::{bfs_levels, DiffusionGraph, Edge, Levels, NodeId};

/// Level-increasing subgraph of a hop-bounded BFS from `src`.
///
/// Holds every node within `bound` hops and every edge `(u, w)` with
/// `level(w) = level(u) + 1`. Any path from the source to `v` in the DAG has
/// exactly `level(v)` hops.
#[derive(Clone, Debug)]
pub struct BfsDag<'g> {
    graph: &'g DiffusionGraph,
    src: NodeId,
    bound: u32,
    levels: Levels,
}

pub fn build_bfs_dag(g: &DiffusionGraph, src: NodeId, bound: u32) -> Result<BfsDag<'_>> {
    let levels = bfs_levels(g, src, Some(bound))?;
    Ok(BfsDag {
        graph: g,
        src,
        bound,
        levels,
    })
}

impl<'g> BfsDag<'g> {
    pub fn graph(&self) -> &'g DiffusionGraph {
        self.graph
    }

    pub fn source(&self) -> NodeId {
        self.src
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn level(&self, v: NodeId) -> Option<u32> {
        self.levels.get(v)
    }

    pub fn levels(&self) -> &Levels {
        &self.levels
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.levels.get(v).is_some()
    }

    /// DAG in-edges of `v`, ascending by source id.
    pub fn preds(&self, v: NodeId) -> impl Iterator<Item = &'g Edge> + '_ {
        let want = self.level(v).and_then(|l| l.checked_sub(1));
        self.graph
            .in_edges(v)
            .filter(move |e| want.is_some() && self.levels.get(e.src) == want)
    }

    /// DAG out-edges of `u`, ascending by destination id.
    pub fn succs(&self, u: NodeId) -> impl Iterator<Item = &'g Edge> + '_ {
        let want = self.level(u).map(|l| l + 1).filter(|&l| l <= self.bound);
        self.graph
            .out_edges(u)
            .filter(move |e| want.is_some() && self.levels.get(e.dst) == want)
    }

    /// All DAG edges in graph edge order.
    pub fn edges(&self) -> impl Iterator<Item = &'g Edge> + '_ {
        self.graph.edges().iter().filter(move |e| {
            matches!((self.levels.get(e.src), self.levels.get(e.dst)), (Some(a), Some(b)) if b == a + 1)
        })
    }

    pub fn node_count(&self) -> usize {
        self.levels.reached()
    }
}

#[derive(Copy, Clone, Debug)]
struct Label {
    cost: f64,
    hops: u32,
    /// `None` marks a junction: a node already in the tree.
    pred: Option<NodeId>,
}

/// Cheapest path that hangs `target` off the current tree.
///
/// Conceptually a shortest path from a super-source joined at zero cost to
/// every node with `in_tree` set, moving only through DAG nodes outside the
/// tree. Returns `[junction, .., target]`. Ties prefer fewer hops, then the
/// lexicographically smaller node sequence. `None` if no tree node is a DAG
/// ancestor of `target`.
pub fn cheapest_attachment(
    dag: &BfsDag<'_>,
    in_tree: &[bool],
    target: NodeId,
    weight: impl Fn(&Edge) -> f64,
) -> Option<Vec<NodeId>> {
    if in_tree[target.index()] {
        return Some(vec![target]);
    }
    dag.level(target)?;

    // Non-tree DAG ancestors of the target reachable without crossing the tree.
    let mut region = vec![target];
    let mut seen: HashMap<NodeId, Option<Label>> = HashMap::from([(target, None)]);
    let mut i = 0;
    while i < region.len() {
        let v = region[i];
        i += 1;
        for e in dag.preds(v) {
            if seen.contains_key(&e.src) {
                continue;
            }
            if in_tree[e.src.index()] {
                let junction = Label {
                    cost: 0.0,
                    hops: 0,
                    pred: None,
                };
                seen.insert(e.src, Some(junction));
            } else {
                seen.insert(e.src, None);
                region.push(e.src);
            }
        }
    }

    // Relax in ascending level so every predecessor is final first.
    region.sort_by_key(|&v| (dag.level(v), v));
    for &v in &region {
        let mut best: Option<Label> = None;
        for e in dag.preds(v) {
            let Some(Some(from)) = seen.get(&e.src).copied() else {
                continue;
            };
            let cand = Label {
                cost: from.cost + weight(e),
                hops: from.hops + 1,
                pred: Some(e.src),
            };
            let better = match best {
                None => true,
                Some(cur) => compare(&seen, &cand, &cur) == Ordering::Less,
            };
            if better {
                best = Some(cand);
            }
        }
        seen.insert(v, best);
    }

    seen.get(&target).copied().flatten()?;
    Some(sequence(&seen, target))
}

fn compare(seen: &HashMap<NodeId, Option<Label>>, a: &Label, b: &Label) -> Ordering {
    a.cost
        .total_cmp(&b.cost)
        .then(a.hops.cmp(&b.hops))
        .then_with(|| match (a.pred, b.pred) {
            (Some(p), Some(q)) => sequence(seen, p).cmp(&sequence(seen, q)),
            _ => Ordering::Equal,
        })
}

fn sequence(seen: &HashMap<NodeId, Option<Label>>, mut v: NodeId) -> Vec<NodeId> {
    let mut out = vec![v];
    while let Some(Some(Label { pred: Some(p), .. })) = seen.get(&v) {
        out.push(*p);
        v = *p;
    }
    out.reverse();
    out
}
