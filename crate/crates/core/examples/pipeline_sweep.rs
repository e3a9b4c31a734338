//! Sweep hidden fractions and algorithms over a simulated corpus.
//!
//! Pass a directory to also write the per-run reports there.

use cascade_infer::algorithm::Algorithm;
use cascade_infer::pipeline::{run_pipeline, PipelineConfig};
use cascade_infer::simulate::power_law;

fn main() -> cascade_infer::Result<()> {
    let g = power_law(1000, 2, 0)?;
    let algorithms = vec![Algorithm::Wbct, Algorithm::BctRand, Algorithm::Wpct, Algorithm::PctRand];
    let mut cfg = PipelineConfig::new(50, vec![0.25, 0.45, 0.65, 0.85], algorithms, 0);
    cfg.min_nodes = 90;
    cfg.max_nodes = Some(110);
    cfg.out_dir = std::env::args_os().nth(1).map(Into::into);

    let res = run_pipeline(&g, &cfg)?;
    println!("sigma\talgorithm\tprec\trec\tfailed");
    for run in &res.runs {
        let show = |v: Option<f64>| v.map_or("-".to_owned(), |v| format!("{v:.3}"));
        println!(
            "{:.2}\t{}\t{}\t{}\t{}",
            run.sigma,
            run.algorithm,
            show(run.report.prec()),
            show(run.report.rec()),
            run.report.failed
        );
    }
    Ok(())
}
