//! Bounded consistent-tree inference: every observed node must sit in the
//! tree no deeper than its observed time.

mod dag;

pub use dag::{build_bfs_dag, cheapest_attachment, BfsDag};

use rand::seq::IteratorRandom;

use crate::error::{Error, InfeasibleReason, Result};
use crate::model::{
    bfs_levels, check_bounded_consistent, CascadeTree, DiffusionGraph, NodeId, ObservationMode,
    PartialObservation,
};
use crate::simulate::rng_from_seed;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoundedMode {
    /// Minimize the negated log-likelihood.
    Weighted,
    /// Minimize the number of edges.
    MinSize,
    /// Random attachment paths; a baseline.
    Random,
}

/// Checks that every observed node is within its observed time of the source.
///
/// This is exactly the condition for a bounded consistent tree to exist.
/// Reports the first violation in ascending (time, node) order.
pub fn check_bounded_feasible(g: &DiffusionGraph, x: &PartialObservation) -> Result<()> {
    x.check_in_graph(g)?;
    let levels = bfs_levels(g, x.source(), None)?;
    for (v, t) in x.by_time() {
        match levels.get(v) {
            None => return Err(Error::infeasible(v, t, InfeasibleReason::Unreachable)),
            Some(d) if d > t => {
                return Err(Error::infeasible(v, t, InfeasibleReason::TooFar { dist: d }))
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Builds a bounded consistent tree for a "by" observation.
///
/// Observed nodes are processed in ascending time and each is hung off the
/// tree built so far by a cheapest path in the BFS DAG bounded at `t_max`.
/// Every node therefore lands at its hop distance from the source. `seed`
/// only matters in [`BoundedMode::Random`].
pub fn infer_bounded_tree(
    g: &DiffusionGraph,
    x: &PartialObservation,
    mode: BoundedMode,
    seed: u64,
) -> Result<CascadeTree> {
    x.require_mode(ObservationMode::By, "bounded inference")?;
    check_bounded_feasible(g, x)?;
    let dag = build_bfs_dag(g, x.source(), x.t_max())?;
    let tree = grow_tree(&dag, x, mode, seed);
    debug_assert!(check_bounded_consistent(g, &tree, x));
    Ok(tree)
}

/// Attaches every observed node to a tree seeded with the source. The caller
/// guarantees each observed node is in the DAG.
pub(crate) fn grow_tree(
    dag: &BfsDag<'_>,
    x: &PartialObservation,
    mode: BoundedMode,
    seed: u64,
) -> CascadeTree {
    let n = dag.graph().node_count();
    let mut in_tree = vec![false; n];
    in_tree[x.source().index()] = true;
    let mut pairs = Vec::new();
    let mut rng = rng_from_seed(seed);
    for (v, _) in x.by_time() {
        if in_tree[v.index()] {
            continue;
        }
        let path = match mode {
            BoundedMode::Weighted => cheapest_attachment(dag, &in_tree, v, |e| e.weight()),
            BoundedMode::MinSize => cheapest_attachment(dag, &in_tree, v, |_| 1.0),
            BoundedMode::Random => Some(random_attachment(dag, &in_tree, v, &mut rng)),
        }
        .expect("observed node is a DAG descendant of the source");
        for w in path.windows(2) {
            in_tree[w[1].index()] = true;
            pairs.push((w[1], w[0]));
        }
    }
    CascadeTree::from_parents(x.source(), pairs).expect("DAG paths form a tree")
}

/// Walks backwards from `target` along uniformly chosen DAG predecessors
/// until it meets the tree.
fn random_attachment(
    dag: &BfsDag<'_>,
    in_tree: &[bool],
    target: NodeId,
    rng: &mut impl rand::Rng,
) -> Vec<NodeId> {
    let mut path = vec![target];
    let mut v = target;
    while !in_tree[v.index()] {
        v = dag
            .preds(v)
            .choose(rng)
            .expect("non-source DAG node has a predecessor")
            .src;
        path.push(v);
    }
    path.reverse();
    path
}
