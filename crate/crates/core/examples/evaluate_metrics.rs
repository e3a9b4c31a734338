//! Score inferred trees against the truth and aggregate over a corpus.

use cascade_infer::algorithm::{infer, Algorithm, InferenceSettings};
use cascade_infer::io::format_metrics;
use cascade_infer::metrics::{aggregate, evaluate, CascadeScore};
use cascade_infer::simulate::{power_law, sample_observation, simulate_icm, SimConfig, SourceChoice};

fn main() -> cascade_infer::Result<()> {
    let g = power_law(400, 2, 5)?;
    let settings = InferenceSettings::default();
    let mut scores = Vec::new();
    for i in 0..20 {
        let mut cfg = SimConfig::new(i, SourceChoice::Random);
        cfg.min_nodes = 15;
        cfg.max_nodes = Some(40);
        let truth = simulate_icm(&g, &cfg)?;
        let x = sample_observation(&truth, 0.5, i, Algorithm::Wpct.observation_mode(&settings))?;
        let score = match infer(Algorithm::Wpct, &g, &x, &settings, i) {
            Ok(t) => evaluate(&truth, &t, &x)?,
            Err(e) if e.is_infeasible() => CascadeScore::failed(&truth, &x),
            Err(e) => return Err(e),
        };
        println!("cascade {i:2}: prec {} rec {}", score.prec, score.rec);
        scores.push(score);
    }
    // Micro-averaged: numerators and denominators are summed first.
    print!("{}", format_metrics(&aggregate(&scores)));
    Ok(())
}
