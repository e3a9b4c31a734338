//! Simulate, observe, infer and evaluate over a corpus of cascades.
//!
//! Cascades are simulated once and shared by every sigma and algorithm. For a
//! given sigma all algorithms see the same hidden nodes; only the reading of
//! the times ("at" or "by") follows the algorithm. Every random choice is
//! derived from the one configured seed, and parallel results are merged in
//! cascade order, so identical configurations give identical output.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::algorithm::{infer_traced, Algorithm, InferenceSettings};
use crate::error::{Error, Infeasible, Result};
use crate::io::{format_run, format_summary, write_file, write_observation, write_tree};
use crate::metrics::{aggregate, evaluate_with, CascadeScore, EvalReport, PlacementRule};
use crate::model::{CascadeTree, DiffusionGraph, ObservationMode, PartialObservation};
use crate::oracle::TreeFamily;
use crate::simulate::{derive_seed, sample_observation, simulate_icm, SimConfig, SourceChoice};

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub cascades: usize,
    pub sigmas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub source: SourceChoice,
    pub min_nodes: usize,
    pub max_nodes: Option<usize>,
    pub max_steps: Option<u32>,
    pub settings: InferenceSettings,
    pub placement: PlacementRule,
    /// Where reports go; `None` keeps everything in memory.
    pub out_dir: Option<PathBuf>,
    /// Also write true trees, observations and inferred trees.
    pub emit_trees: bool,
    /// Also write `timings.txt`. Off by default so reruns are byte-identical.
    pub record_timings: bool,
}

impl PipelineConfig {
    pub fn new(cascades: usize, sigmas: Vec<f64>, algorithms: Vec<Algorithm>, seed: u64) -> Self {
        PipelineConfig {
            cascades,
            sigmas,
            algorithms,
            seed,
            source: SourceChoice::Random,
            min_nodes: 1,
            max_nodes: None,
            max_steps: None,
            settings: InferenceSettings::default(),
            placement: PlacementRule::Depth,
            out_dir: None,
            emit_trees: false,
            record_timings: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(s) = self.sigmas.iter().find(|s| !(0.0..1.0).contains(*s)) {
            return Err(Error::Contract(format!("sigma {s} outside [0, 1)")));
        }
        if self.sigmas.is_empty() || self.algorithms.is_empty() {
            return Err(Error::Contract("need at least one sigma and one algorithm".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CascadeOutcome {
    pub index: usize,
    pub score: CascadeScore,
    pub tree: Option<CascadeTree>,
    pub infeasible: Option<Infeasible>,
    pub exact_fallback: bool,
    pub elapsed: Duration,
}

/// Everything one algorithm produced at one sigma.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub sigma: f64,
    pub algorithm: Algorithm,
    pub family: TreeFamily,
    pub report: EvalReport,
    pub outcomes: Vec<CascadeOutcome>,
    pub exact_fallbacks: usize,
}

/// Wall-clock per phase. Inference time is summed over cascades, so with
/// several threads it can exceed the elapsed time.
#[derive(Clone, Debug, Default)]
pub struct Timings {
    pub simulate: Duration,
    pub observe: Duration,
    pub infer: Vec<(Algorithm, Duration)>,
    pub write: Duration,
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub truths: Vec<CascadeTree>,
    /// Observations per sigma, in config order, in "exact" mode.
    pub observations: Vec<Vec<PartialObservation>>,
    pub runs: Vec<RunReport>,
    pub timings: Timings,
}

impl PipelineResult {
    pub fn run(&self, sigma: f64, algorithm: Algorithm) -> Option<&RunReport> {
        self.runs
            .iter()
            .find(|r| r.sigma == sigma && r.algorithm == algorithm)
    }
}

fn with_index<T>(index: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Cascade {
        index,
        source: Box::new(e),
    })
}

pub fn simulate_corpus(g: &DiffusionGraph, cfg: &PipelineConfig) -> Result<Vec<CascadeTree>> {
    (0..cfg.cascades)
        .into_par_iter()
        .map(|i| {
            let sim = SimConfig {
                seed: derive_seed(cfg.seed, &[0, i as u64]),
                source: cfg.source,
                min_nodes: cfg.min_nodes,
                max_nodes: cfg.max_nodes,
                max_steps: cfg.max_steps,
                retry_cap: 1000,
            };
            with_index(i, simulate_icm(g, &sim))
        })
        .collect()
}

pub fn run_pipeline(g: &DiffusionGraph, cfg: &PipelineConfig) -> Result<PipelineResult> {
    cfg.validate()?;
    let mut timings = Timings::default();

    let clock = Instant::now();
    let truths = simulate_corpus(g, cfg)?;
    timings.simulate = clock.elapsed();

    let clock = Instant::now();
    let observations: Vec<Vec<PartialObservation>> = cfg
        .sigmas
        .iter()
        .enumerate()
        .map(|(j, &sigma)| {
            truths
                .par_iter()
                .enumerate()
                .map(|(i, t)| {
                    let seed = derive_seed(cfg.seed, &[1, j as u64, i as u64]);
                    with_index(i, sample_observation(t, sigma, seed, ObservationMode::Exact))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    timings.observe = clock.elapsed();

    let mut runs = Vec::new();
    let mut infer_time = vec![Duration::ZERO; cfg.algorithms.len()];
    for (j, &sigma) in cfg.sigmas.iter().enumerate() {
        for (a, &alg) in cfg.algorithms.iter().enumerate() {
            let mode = alg.observation_mode(&cfg.settings);
            let outcomes: Vec<CascadeOutcome> = truths
                .par_iter()
                .zip(&observations[j])
                .enumerate()
                .map(|(i, (truth, x))| {
                    let x = x.clone().with_mode(mode);
                    let seed = derive_seed(cfg.seed, &[2, j as u64, i as u64, a as u64]);
                    let clock = Instant::now();
                    let inferred = infer_traced(alg, g, &x, &cfg.settings, seed);
                    let elapsed = clock.elapsed();
                    let outcome = match inferred {
                        Ok(inf) => CascadeOutcome {
                            index: i,
                            score: with_index(i, evaluate_with(truth, &inf.tree, &x, cfg.placement))?,
                            tree: Some(inf.tree),
                            infeasible: None,
                            exact_fallback: inf.exact_fallback,
                            elapsed,
                        },
                        Err(Error::Infeasible(why)) => CascadeOutcome {
                            index: i,
                            score: CascadeScore::failed(truth, &x),
                            tree: None,
                            infeasible: Some(why),
                            exact_fallback: false,
                            elapsed,
                        },
                        Err(e) => return with_index(i, Err(e)),
                    };
                    Ok(outcome)
                })
                .collect::<Result<_>>()?;
            infer_time[a] += outcomes.iter().map(|o| o.elapsed).sum::<Duration>();
            runs.push(RunReport {
                sigma,
                algorithm: alg,
                family: alg.family(&cfg.settings),
                report: aggregate(outcomes.iter().map(|o| &o.score)),
                exact_fallbacks: outcomes.iter().filter(|o| o.exact_fallback).count(),
                outcomes,
            });
        }
    }
    timings.infer = cfg.algorithms.iter().copied().zip(infer_time).collect();

    let mut result = PipelineResult {
        truths,
        observations,
        runs,
        timings,
    };
    if let Some(dir) = &cfg.out_dir {
        let clock = Instant::now();
        write_outputs(g, cfg, &result, dir)?;
        result.timings.write = clock.elapsed();
        if cfg.record_timings {
            write_file(&dir.join("timings.txt"), &format_timings(&result.timings))?;
        }
    }
    Ok(result)
}

/// Name of the report file for one run.
pub fn report_file_name(sigma: f64, algorithm: Algorithm) -> String {
    format!("report_s{sigma:.2}_{algorithm}.txt")
}

fn write_outputs(
    g: &DiffusionGraph,
    cfg: &PipelineConfig,
    result: &PipelineResult,
    dir: &std::path::Path,
) -> Result<()> {
    for run in &result.runs {
        write_file(
            &dir.join(report_file_name(run.sigma, run.algorithm)),
            &format_run(run, cfg.placement),
        )?;
    }
    write_file(&dir.join("summary.txt"), &format_summary(cfg, result))?;
    if !cfg.emit_trees {
        return Ok(());
    }
    let file = |i: usize| format!("cascade_{i:05}.txt");
    for (i, t) in result.truths.iter().enumerate() {
        write_tree(&dir.join("truth").join(file(i)), g, t)?;
    }
    for (sigma, xs) in cfg.sigmas.iter().zip(&result.observations) {
        let sub = dir.join("observations").join(format!("s{sigma:.2}"));
        for (i, x) in xs.iter().enumerate() {
            write_observation(&sub.join(file(i)), g, x)?;
        }
    }
    for run in &result.runs {
        let sub = dir
            .join("trees")
            .join(format!("s{:.2}", run.sigma))
            .join(run.algorithm.name());
        for o in &run.outcomes {
            if let Some(t) = &o.tree {
                write_tree(&sub.join(file(o.index)), g, t)?;
            }
        }
    }
    Ok(())
}

pub fn format_timings(t: &Timings) -> String {
    let mut out = format!(
        "simulate\t{:.3}s\nobserve\t{:.3}s\n",
        t.simulate.as_secs_f64(),
        t.observe.as_secs_f64()
    );
    for (alg, d) in &t.infer {
        out.push_str(&format!("infer:{alg}\t{:.3}s\n", d.as_secs_f64()));
    }
    out.push_str(&format!("write\t{:.3}s\n", t.write.as_secs_f64()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::power_law;

    #[test]
    fn full_observation_recovers_every_edge() {
        let g = power_law(60, 2, 5).unwrap().map_probs(|_| 1.0).unwrap();
        let mut cfg = PipelineConfig::new(5, vec![0.0], vec![Algorithm::Wbct, Algorithm::Wpct], 9);
        cfg.min_nodes = 3;
        let res = run_pipeline(&g, &cfg).unwrap();
        for run in &res.runs {
            assert_eq!(run.report.failed, 0);
            assert_eq!(run.report.prec_e(), Some(1.0), "{}", run.algorithm);
            assert_eq!(run.report.prec(), None);
        }
    }

    #[test]
    fn file_layout_and_determinism() {
        let g = power_law(80, 2, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = PipelineConfig::new(10, vec![0.25, 0.85], vec![Algorithm::Wpct], 3);
        cfg.min_nodes = 4;
        cfg.out_dir = Some(dir.path().join("a"));
        run_pipeline(&g, &cfg).unwrap();
        let mut names: Vec<_> = std::fs::read_dir(dir.path().join("a"))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(
            names,
            ["report_s0.25_wpct.txt", "report_s0.85_wpct.txt", "summary.txt"]
        );
        cfg.out_dir = Some(dir.path().join("b"));
        run_pipeline(&g, &cfg).unwrap();
        for n in &names {
            let a = std::fs::read(dir.path().join("a").join(n)).unwrap();
            let b = std::fs::read(dir.path().join("b").join(n)).unwrap();
            assert_eq!(a, b, "{n}");
        }
    }

    #[test]
    fn bad_sigma_is_rejected() {
        let g = power_law(10, 2, 1).unwrap();
        let cfg = PipelineConfig::new(1, vec![1.0], vec![Algorithm::Wbct], 0);
        assert!(matches!(run_pipeline(&g, &cfg), Err(Error::Contract(_))));
    }
}
