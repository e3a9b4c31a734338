//! Perfect trees: observed nodes sit at exactly their observed time.
//!
//! Shows the pruned backbone, the per-level forest problems solved bottom-up,
//! and how the three per-level strategies compare.

use cascade_infer::io::format_tree;
use cascade_infer::model::tree_cost;
use cascade_infer::perfect::{build_backbone, infer_perfect_with, ForestStrategy, PerfectSettings};
use cascade_infer::samples::{ad_campaign, ad_campaign_observation};
use cascade_infer::ObservationMode;

fn main() -> cascade_infer::Result<()> {
    let g = ad_campaign();
    let x = ad_campaign_observation(&g, ObservationMode::Exact);

    let bb = build_backbone(&g, &x)?;
    let kept: Vec<&str> = bb.nodes().map(|v| g.label(v)).collect();
    println!("backbone keeps {} of {} nodes: {}", bb.node_count(), g.node_count(), kept.join(" "));

    let out = infer_perfect_with(&g, &x, &PerfectSettings::new(ForestStrategy::Exact), 0)?;
    for r in &out.levels {
        let created: Vec<&str> = r.created.iter().map(|&v| g.label(v)).collect();
        println!(
            "level {}: {} leaves, {} candidate parents, cost {:.4}, new parents [{}]",
            r.problem.level,
            r.problem.leaves.len(),
            r.problem.roots.len(),
            r.forest.cost,
            created.join(" ")
        );
    }
    print!("{}", format_tree(&g, &out.tree));

    for strategy in [ForestStrategy::Exact, ForestStrategy::Greedy, ForestStrategy::Random] {
        let t = infer_perfect_with(&g, &x, &PerfectSettings::new(strategy), 3)?.tree;
        println!("{strategy:?}: -log L = {:.4}", tree_cost(&g, &t)?);
    }
    Ok(())
}
