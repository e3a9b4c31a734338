//! Generate a graph, run one cascade and hide part of it.

use cascade_infer::io::{format_observation, format_tree};
use cascade_infer::simulate::{power_law, sample_observation, simulate_icm, SimConfig, SourceChoice};
use cascade_infer::ObservationMode;

fn main() -> cascade_infer::Result<()> {
    let g = power_law(500, 2, 1)?;
    println!("graph: {} nodes, {} edges", g.node_count(), g.edge_count());

    let mut cfg = SimConfig::new(42, SourceChoice::Random);
    cfg.min_nodes = 10;
    cfg.max_nodes = Some(20);
    let t = simulate_icm(&g, &cfg)?;
    println!("cascade: {} nodes, depth {}", t.len(), t.depth());
    print!("{}", format_tree(&g, &t));

    let x = sample_observation(&t, 0.5, 43, ObservationMode::Exact)?;
    println!("observed {} of {}:", x.len(), t.len());
    print!("{}", format_observation(&g, &x));
    Ok(())
}
