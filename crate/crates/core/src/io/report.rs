//! Plain-text rendering of evaluation results.

use std::fmt::Write as _;

use crate::metrics::{EvalReport, PlacementRule, Ratio};
use crate::pipeline::{PipelineConfig, PipelineResult, RunReport};

fn value(r: Ratio) -> String {
    r.value().map_or_else(|| "undefined".to_owned(), |v| format!("{v:.6}"))
}

fn family_name(f: crate::oracle::TreeFamily) -> &'static str {
    match f {
        crate::oracle::TreeFamily::Bounded => "bounded",
        crate::oracle::TreeFamily::Perfect => "perfect",
        crate::oracle::TreeFamily::ShortestPath => "shortest-path",
    }
}

fn placement_name(p: PlacementRule) -> &'static str {
    match p {
        PlacementRule::Depth => "depth",
        PlacementRule::Ancestors => "ancestors",
    }
}

/// The four micro-averaged metrics as a `metric value num den` table.
pub fn format_metrics(r: &EvalReport) -> String {
    let mut out = String::from("metric\tvalue\tnum\tden\n");
    let t = &r.totals;
    for (name, ratio) in [("prec", t.prec), ("rec", t.rec), ("prec_v", t.prec_v), ("prec_e", t.prec_e)] {
        writeln!(out, "{name}\t{}\t{}\t{}", value(ratio), ratio.num, ratio.den).unwrap();
    }
    out
}

/// Report for one (sigma, algorithm) run, including per-cascade components.
pub fn format_run(run: &RunReport, placement: PlacementRule) -> String {
    let mut out = String::from("# cascade inference report\n");
    let r = &run.report;
    writeln!(out, "algorithm\t{}", run.algorithm).unwrap();
    writeln!(out, "family\t{}", family_name(run.family)).unwrap();
    writeln!(out, "sigma\t{:.2}", run.sigma).unwrap();
    writeln!(out, "cascades\t{}", r.cascades).unwrap();
    writeln!(out, "failed\t{}", r.failed).unwrap();
    writeln!(out, "exact_fallbacks\t{}", run.exact_fallbacks).unwrap();
    writeln!(out, "placement\t{}", placement_name(placement)).unwrap();
    out.push('\n');
    out.push_str(&format_metrics(r));
    out.push_str("\nindex\tstatus\tprec\trec\tprec_v\tprec_e\n");
    for o in &run.outcomes {
        let s = &o.score;
        let status = if s.failed { "infeasible" } else { "ok" };
        writeln!(
            out,
            "{}\t{status}\t{}\t{}\t{}\t{}",
            o.index, s.prec, s.rec, s.prec_v, s.prec_e
        )
        .unwrap();
    }
    out
}

/// One line per (sigma, algorithm) with the headline metrics.
pub fn format_summary(cfg: &PipelineConfig, result: &PipelineResult) -> String {
    let mut out = String::from("# cascade inference summary\n");
    writeln!(out, "seed\t{}", cfg.seed).unwrap();
    writeln!(out, "cascades\t{}", result.truths.len()).unwrap();
    let nodes: usize = result.truths.iter().map(|t| t.len()).sum();
    let mean = nodes as f64 / result.truths.len().max(1) as f64;
    writeln!(out, "mean_cascade_size\t{mean:.2}").unwrap();
    out.push_str("\nsigma\talgorithm\tprec\trec\tprec_v\tprec_e\tfailed\n");
    for run in &result.runs {
        let t = &run.report.totals;
        writeln!(
            out,
            "{:.2}\t{}\t{}\t{}\t{}\t{}\t{}",
            run.sigma,
            run.algorithm,
            value(t.prec),
            value(t.rec),
            value(t.prec_v),
            value(t.prec_e),
            run.report.failed
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{aggregate, CascadeScore};

    #[test]
    fn undefined_metrics_are_spelled_out() {
        let r = aggregate(&[CascadeScore::default()]);
        let text = format_metrics(&r);
        assert!(text.contains("prec\tundefined\t0\t0"));
        let r = aggregate(&[CascadeScore {
            prec: Ratio::new(2, 3),
            ..Default::default()
        }]);
        assert!(format_metrics(&r).contains("prec\t0.666667\t2\t3"));
    }
}
