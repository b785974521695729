use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::scenario::{ExperimentSpec, Scenario, ScenarioError};
use crate::buffering::{degeneracy_sweep, DegeneracySpec, FunctionDemand};
use crate::cascade::{motter_lai_cascade, watts_cascade, weighted_cascade_sweep, CascadeResult, LoadCascadeSpec};
use crate::cascade::{ThresholdCascadeSpec, Trigger};
use crate::error::Result;
use crate::graph;
use crate::interdependent::pc_sweep;
use crate::percolation::{empirical_threshold, sweep_with, RemovalPlan, SweepOptions};
use crate::seed;
use crate::truth::{classify_and_rerank, confidence_intervals, em_estimate, synth_generate, SourceClaimNetwork};

pub const CASCADE_SUMMARY_HEADER: &str = "replicate,initial_failures,failed_fraction,survivor_fraction,rounds";

/// A cascade run counts as global when more than this fraction fails.
pub const GLOBAL_CASCADE_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the scenario's master seed.
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub manifest: PathBuf,
    /// Experiment-level numbers also recorded in the manifest.
    pub summary: Map<String, Value>,
}

/// In-memory results: `(file name, contents)` pairs plus summary values.
struct Artifacts {
    files: Vec<(&'static str, String)>,
    summary: Map<String, Value>,
}

pub fn run_scenario_file(path: &Path, options: &RunOptions) -> std::result::Result<RunReport, ScenarioError> {
    run_scenario(&Scenario::from_file(path)?, options)
}

/// Runs the experiment, writes its CSVs and a `manifest.json` into
/// `options.out_dir`. CSV bytes depend only on the scenario and seed.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions) -> std::result::Result<RunReport, ScenarioError> {
    let seed = options.seed.unwrap_or(scenario.seed);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = options.jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| ScenarioError::Runtime(std::io::Error::other(e.to_string()).into()))?;
    let started = Instant::now();
    let artifacts = pool.install(|| execute(scenario, seed))?;
    let wall = started.elapsed().as_secs_f64();

    std::fs::create_dir_all(&options.out_dir).map_err(|e| ScenarioError::Runtime(e.into()))?;
    let mut outputs = Vec::new();
    for (name, contents) in &artifacts.files {
        let path = options.out_dir.join(format!("{}{name}", scenario.output_prefix));
        std::fs::write(&path, contents).map_err(|e| ScenarioError::Runtime(e.into()))?;
        outputs.push(path);
    }
    let manifest = json!({
        "experiment": scenario.experiment.name(),
        "seed": seed,
        "replicates": scenario.replicates,
        "version": env!("CARGO_PKG_VERSION"),
        "jobs": pool.current_num_threads(),
        "wall_time_seconds": wall,
        "outputs": outputs.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect::<Vec<_>>(),
        "summary": Value::Object(artifacts.summary.clone()),
        "scenario": scenario.raw,
    });
    let manifest_path = options.out_dir.join(format!("{}manifest.json", scenario.output_prefix));
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    std::fs::write(&manifest_path, text).map_err(|e| ScenarioError::Runtime(e.into()))?;
    Ok(RunReport { outputs, manifest: manifest_path, summary: artifacts.summary })
}

fn execute(scenario: &Scenario, seed: u64) -> Result<Artifacts> {
    let reps = scenario.replicates;
    let mut summary = Map::new();
    let files = match &scenario.spec {
        ExperimentSpec::PercolationSweep(s) => {
            let options = SweepOptions { path_pairs: s.path_pairs };
            let curve = sweep_with(&s.generator, &RemovalPlan::new(s.strategy, 0), &s.f_grid, reps, seed, &options)?;
            if let Some(cutoff) = s.threshold_cutoff {
                let threshold = if curve.rows.len() >= 2 { empirical_threshold(&curve, cutoff)? } else { None };
                summary.insert("empirical_threshold".into(), json!(threshold));
            }
            vec![("percolation.csv", curve.to_csv())]
        }
        ExperimentSpec::Watts(s) => {
            let runs: Vec<CascadeResult> = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let rep = seed::replicate_seed(seed, r);
                    let g = graph::generate(&s.generator.with_seed(seed::derive(rep, 0)))?;
                    watts_cascade(&g, &ThresholdCascadeSpec { phi: s.phi, seed_count: s.seed_count, seed: seed::derive(rep, 1) })
                })
                .collect::<Result<_>>()?;
            cascade_outputs("watts", &runs, s.generator.n, &mut summary)
        }
        ExperimentSpec::MotterLai(s) => {
            let runs: Vec<CascadeResult> = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let rep = seed::replicate_seed(seed, r);
                    let g = graph::generate(&s.generator.with_seed(seed::derive(rep, 0)))?;
                    let trigger = Trigger { plan: RemovalPlan::new(s.strategy, seed::derive(rep, 1)), fraction: s.fraction };
                    motter_lai_cascade(&g, &LoadCascadeSpec { alpha: s.alpha, trigger })
                })
                .collect::<Result<_>>()?;
            cascade_outputs("motter_lai", &runs, s.generator.n, &mut summary)
        }
        ExperimentSpec::WeightedBeta(s) => {
            let sweep = weighted_cascade_sweep(&s.generator, &s.beta_grid, &s.f_grid, s.alpha, s.flow_model, reps, seed)?;
            vec![("beta_sweep.csv", sweep.sweep_csv()), ("beta_trace.csv", sweep.trace_csv())]
        }
        ExperimentSpec::Interdependent(s) => {
            let curve = pc_sweep(&s.net_a, &s.net_b, &s.p_grid, s.coupling, reps, seed)?;
            summary.insert("critical_fraction".into(), json!(curve.critical));
            vec![("interdependent.csv", curve.to_csv())]
        }
        ExperimentSpec::Buffering(s) => {
            let spec = DegeneracySpec {
                n_agents: s.n_agents,
                n_functions: s.n_functions,
                versatility_grid: s.versatility_grid.clone(),
                capacity_grid: s.capacity_grid.clone(),
                removal_fraction: s.removal_fraction,
                demand: FunctionDemand::new(s.demand.clone())?,
                replicates: reps,
                seed,
            };
            vec![("buffering.csv", degeneracy_sweep(&spec)?.to_csv())]
        }
        ExperimentSpec::Truth(s) => {
            let net = match (&s.assertions, s.synth_spec(seed)) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(scenario.base_dir.join(path))?;
                    SourceClaimNetwork::from_csv(&text, s.n_sources, s.n_claims)?
                }
                (None, Some(spec)) => synth_generate(&spec)?.0,
                (None, None) => unreachable!("validated: one input is present"),
            };
            let est = confidence_intervals(&em_estimate(&net, &s.em)?, &net, s.level)?;
            let cls = classify_and_rerank(&est, s.threshold);
            summary.insert("log_likelihood".into(), json!(est.log_likelihood));
            summary.insert("iterations".into(), json!(est.iterations));
            summary.insert("converged".into(), json!(est.converged));
            summary.insert("d_hat".into(), json!(est.d));
            summary.insert("source_ranking".into(), json!(cls.ranking));
            vec![("estimates.csv", est.estimates_csv()), ("claims.csv", cls.claims_csv(&est))]
        }
    };
    Ok(Artifacts { files, summary })
}

fn cascade_outputs(
    name: &'static str,
    runs: &[CascadeResult],
    n: usize,
    summary: &mut Map<String, Value>,
) -> Vec<(&'static str, String)> {
    let mut csv = format!("{CASCADE_SUMMARY_HEADER}\n");
    let mut global = 0;
    for (r, res) in runs.iter().enumerate() {
        let failed = res.failed.len() as f64 / n as f64;
        if failed > GLOBAL_CASCADE_FRACTION {
            global += 1;
        }
        csv.push_str(&format!("{r},{},{failed},{},{}\n", res.initial_count(), res.survivor_fraction, res.rounds.len()));
    }
    summary.insert("global_cascade_frequency".into(), json!(global as f64 / runs.len() as f64));
    let (summary_name, trace_name) = match name {
        "watts" => ("watts_summary.csv", "watts_trace.csv"),
        _ => ("motter_lai_summary.csv", "motter_lai_trace.csv"),
    };
    vec![(summary_name, csv), (trace_name, runs[0].trace_csv())]
}
