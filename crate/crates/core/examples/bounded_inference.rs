//! Bounded trees: every observed node must be reached no later than its time.
//!
//! Runs the weighted, fewest-edge and random variants on the advertising
//! network and prints each tree with its log-likelihood.

use cascade_infer::bounded::{check_bounded_feasible, infer_bounded_tree, BoundedMode};
use cascade_infer::io::format_tree;
use cascade_infer::model::tree_log_likelihood;
use cascade_infer::samples::{ad_campaign, ad_campaign_observation};
use cascade_infer::ObservationMode;

fn main() -> cascade_infer::Result<()> {
    let g = ad_campaign();
    let x = ad_campaign_observation(&g, ObservationMode::By);
    check_bounded_feasible(&g, &x)?;

    for (name, mode) in [
        ("weighted", BoundedMode::Weighted),
        ("fewest edges", BoundedMode::MinSize),
        ("random", BoundedMode::Random),
    ] {
        let t = infer_bounded_tree(&g, &x, mode, 7)?;
        println!("{name}: log L = {:.4}", tree_log_likelihood(&g, &t)?);
        print!("{}", format_tree(&g, &t));
    }
    Ok(())
}
