use std::collections::VecDeque;

use super::{DiffusionGraph, NodeId};
use crate::error::Result;

const UNREACHED: u32 = u32::MAX;

/// Hop distances from (or to) a single node, dense over the graph's ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Levels {
    dist: Vec<u32>,
    reached: usize,
}

impl Levels {
    pub fn get(&self, v: NodeId) -> Option<u32> {
        match self.dist.get(v.index()) {
            Some(&d) if d != UNREACHED => Some(d),
            _ => None,
        }
    }

    /// Number of nodes with a level.
    pub fn reached(&self) -> usize {
        self.reached
    }

    /// `(node, level)` for every reached node, ascending by node id.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.dist
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != UNREACHED)
            .map(|(i, &d)| (NodeId::from(i), d))
    }

    pub fn max_level(&self) -> u32 {
        self.iter().map(|(_, d)| d).max().unwrap_or(0)
    }
}

#[derive(Copy, Clone)]
enum Direction {
    Forward,
    Reverse,
}

fn bfs(g: &DiffusionGraph, src: NodeId, bound: Option<u32>, dir: Direction) -> Result<Levels> {
    g.check_node(src)?;
    let mut dist = vec![UNREACHED; g.node_count()];
    let mut queue = VecDeque::from([src]);
    dist[src.index()] = 0;
    let mut reached = 1;
    let bound = bound.unwrap_or(u32::MAX - 1);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()];
        if du >= bound {
            continue;
        }
        let mut visit = |w: NodeId| {
            if dist[w.index()] == UNREACHED {
                dist[w.index()] = du + 1;
                reached += 1;
                queue.push_back(w);
            }
        };
        match dir {
            Direction::Forward => g.out_edges(u).for_each(|e| visit(e.dst)),
            Direction::Reverse => g.in_edges(u).for_each(|e| visit(e.src)),
        }
    }
    Ok(Levels { dist, reached })
}

/// Hop distance from `src` to every node it reaches within `bound` hops.
pub fn bfs_levels(g: &DiffusionGraph, src: NodeId, bound: Option<u32>) -> Result<Levels> {
    bfs(g, src, bound, Direction::Forward)
}

/// Hop distance from every node that reaches `dst` within `bound` hops.
pub fn reverse_bfs_levels(g: &DiffusionGraph, dst: NodeId, bound: Option<u32>) -> Result<Levels> {
    bfs(g, dst, bound, Direction::Reverse)
}

/// Largest finite directed hop distance between any two nodes.
pub fn diameter(g: &DiffusionGraph) -> u32 {
    g.nodes()
        .map(|v| bfs(g, v, None, Direction::Forward).map_or(0, |l| l.max_level()))
        .max()
        .unwrap_or(0)
}
