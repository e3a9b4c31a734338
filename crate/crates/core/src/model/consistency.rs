//! Consistency validators and the likelihood of a cascade tree.

use super::{bfs_levels, CascadeTree, DiffusionGraph, PartialObservation};
use crate::error::{Error, Result};

/// `Σ ln f(u, v)` over tree edges, natural log. Never positive.
pub fn tree_log_likelihood(g: &DiffusionGraph, t: &CascadeTree) -> Result<f64> {
    t.edges().try_fold(0.0, |acc, (u, v)| match g.prob(u, v) {
        Some(p) => Ok(acc + p.ln()),
        None => Err(Error::MissingEdge { src: u, dst: v }),
    })
}

/// Negated log-likelihood `-L_X(T)`, the quantity weighted inference minimizes.
pub fn tree_cost(g: &DiffusionGraph, t: &CascadeTree) -> Result<f64> {
    tree_log_likelihood(g, t).map(|l| -l)
}

fn rooted_subtree(g: &DiffusionGraph, t: &CascadeTree, x: &PartialObservation) -> bool {
    t.root() == x.source() && t.check_in_graph(g).is_ok()
}

/// Every observed node is in the tree at depth no greater than its time.
pub fn check_bounded_consistent(g: &DiffusionGraph, t: &CascadeTree, x: &PartialObservation) -> bool {
    rooted_subtree(g, t, x)
        && x
            .points()
            .all(|(v, tv)| t.time(v).is_some_and(|d| d <= tv))
}

/// Every observed node is in the tree at depth equal to its time.
pub fn check_perfect_consistent(g: &DiffusionGraph, t: &CascadeTree, x: &PartialObservation) -> bool {
    rooted_subtree(g, t, x) && x.points().all(|(v, tv)| t.time(v) == Some(tv))
}

/// Perfect-consistent, and every observed time is the graph distance from the source.
pub fn check_sp_consistent(g: &DiffusionGraph, t: &CascadeTree, x: &PartialObservation) -> bool {
    if !check_perfect_consistent(g, t, x) {
        return false;
    }
    let Ok(levels) = bfs_levels(g, x.source(), Some(x.t_max())) else {
        return false;
    };
    x.points().all(|(v, tv)| levels.get(v) == Some(tv))
}
