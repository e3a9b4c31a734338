//! Exhaustive search on a small graph, for checking heuristics.
//!
//! Finds the most likely and the smallest consistent tree for each family and
//! counts how many minimal perfect trees exist.

use cascade_infer::io::format_tree;
use cascade_infer::oracle::{for_each_minimal_tree, oracle_solve, Objective, OracleQuery, TreeFamily, ORACLE_NODE_CAP};
use cascade_infer::samples::{ad_campaign, ad_campaign_observation};
use cascade_infer::ObservationMode;

fn main() -> cascade_infer::Result<()> {
    let g = ad_campaign();
    for (family, mode) in [
        (TreeFamily::Bounded, ObservationMode::By),
        (TreeFamily::Perfect, ObservationMode::Exact),
        (TreeFamily::ShortestPath, ObservationMode::Exact),
    ] {
        let x = ad_campaign_observation(&g, mode);
        for objective in [Objective::MaxLikelihood, Objective::MinSize] {
            let answer = oracle_solve(&OracleQuery::new(&g, &x, family, objective))?;
            println!("{family:?} / {objective:?}:");
            match answer.tree() {
                Some(t) => print!("{}", format_tree(&g, t)),
                None => println!("  no consistent tree"),
            }
        }
    }

    let x = ad_campaign_observation(&g, ObservationMode::Exact);
    let count = for_each_minimal_tree(&g, &x, TreeFamily::Perfect, ORACLE_NODE_CAP, |_| {})?;
    println!("{count} minimal perfect trees");
    Ok(())
}
