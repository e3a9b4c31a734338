//! Shortest-path trees: every observed time equals the hop distance.
//!
//! Builds a small random graph, observes some nodes at their BFS distance and
//! compares the Steiner-based tree with the plain union of shortest paths.

use cascade_infer::model::{bfs_levels, tree_cost};
use cascade_infer::simulate::power_law;
use cascade_infer::sp::{check_sp_feasible, infer_sp_tree, sp_fallback_tree, SpMode};
use cascade_infer::{NodeId, ObservationMode, PartialObservation};

fn main() -> cascade_infer::Result<()> {
    let g = power_law(300, 2, 11)?;
    let s = NodeId(0);
    let levels = bfs_levels(&g, s, None)?;
    // Every fifth reachable node, at its true distance.
    let points: Vec<_> = levels.iter().filter(|&(v, _)| v == s || v.index() % 5 == 0).collect();
    let x = PartialObservation::new(s, points, ObservationMode::Exact)?;
    check_sp_feasible(&g, &x)?;

    for mode in [SpMode::Weighted, SpMode::MinSize] {
        let t = infer_sp_tree(&g, &x, mode)?;
        let union = sp_fallback_tree(&g, &x, mode)?;
        println!(
            "{mode:?}: {} observed, tree {} nodes / cost {:.3}, path union {} nodes / cost {:.3}",
            x.len(),
            t.len(),
            tree_cost(&g, &t)?,
            union.len(),
            tree_cost(&g, &union)?
        );
    }
    Ok(())
}
