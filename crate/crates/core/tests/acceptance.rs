//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero exit
//! if any fails. Built with `harness = false`; run it with
//! `cargo test -p resil-core --test acceptance`.

mod common;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::Rng;

use resil::buffering::{build_pool, degeneracy_sweep, perturb_recover, Agent, AgentPool, DegeneracySpec, FunctionDemand};
use resil::cascade::{
    failure_risk_exact, failure_risk_monte_carlo, motter_lai_cascade, risk_topology, watts_cascade,
    weighted_cascade_sweep, FlowModel, LoadCascadeSpec, PropagationModel, RiskTopology, ThresholdCascadeSpec, Trigger,
};
use resil::graph::{betweenness, effective_conductance, generate, DegreeDistribution, GeneratorKind, GeneratorSpec};
use resil::harness::{run_scenario, RunOptions, Scenario};
use resil::interdependent::{pc_sweep, SweepCoupling};
use resil::percolation::{empirical_threshold, sweep, RemovalPlan, RemovalStrategy};
use resil::seed::derive;
use resil::truth::{classify_and_rerank, confidence_intervals, em_estimate, flip_source, synth_generate, EmOptions, SynthSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn grid(step: f64, last: f64) -> Vec<f64> {
    let k = (last / step).round() as usize;
    (0..=k).map(|i| (i as f64 * step * 1e9).round() / 1e9).collect()
}

fn minutes(m: f64) -> Duration {
    Duration::from_secs_f64(60.0 * m)
}

fn robust_yet_fragile() -> Outcome {
    let n = 2000;
    let sf = GeneratorSpec::new(GeneratorKind::ConfigPowerLaw { gamma: 2.5, k_min: 2, k_max: Some(100) }, n, 0);
    let mean = sf.degree_distribution().unwrap().mean().unwrap();
    let exp = GeneratorSpec::new(GeneratorKind::ConfigExponential { mean_degree: mean, k_min: 2, k_max: None }, n, 0);
    let f = [0.0, 0.10];
    let gap = |spec: &GeneratorSpec| {
        let random = sweep(spec, &RemovalPlan::new(RemovalStrategy::Random, 0), &f, 20, 1).unwrap();
        let targeted = sweep(spec, &RemovalPlan::new(RemovalStrategy::TargetedStaticDegree, 0), &f, 20, 1).unwrap();
        (random.rows[1].s_mean, targeted.rows[1].s_mean)
    };
    let (sf_r, sf_t) = gap(&sf);
    let (ex_r, ex_t) = gap(&exp);
    let (sf_gap, ex_gap) = (sf_r - sf_t, ex_r - ex_t);
    outcome(
        sf_gap >= 0.15 && ex_gap < 0.5 * sf_gap,
        format!(
            "<k>={mean:.3}; scale-free S random {sf_r:.3} targeted {sf_t:.3} gap {sf_gap:.3} (need >= 0.15); \
             exponential gap {ex_gap:.3} (need < {:.3})",
            0.5 * sf_gap
        ),
    )
}

fn analytic_threshold() -> Outcome {
    let er = GeneratorSpec::new(GeneratorKind::ErdosRenyi { mean_degree: 2.0 }, 5000, 0);
    let curve = sweep(&er, &RemovalPlan::new(RemovalStrategy::Random, 0), &grid(0.01, 0.8), 10, 2).unwrap();
    let fc = empirical_threshold(&curve, 0.05).unwrap();
    let pass = fc.is_some_and(|x| (x - 0.5).abs() <= 0.05);
    outcome(pass, format!("empirical threshold {fc:?} vs 0.5 (tolerance 0.05)"))
}

fn watts_window() -> Outcome {
    let n = 1000;
    let frequency = |z: f64| {
        let spec = GeneratorSpec::new(GeneratorKind::ErdosRenyi { mean_degree: z }, n, 0);
        let global = (0..200u64)
            .filter(|&r| {
                let g = generate(&spec.with_seed(derive(r, 0))).unwrap();
                let res = watts_cascade(&g, &ThresholdCascadeSpec { phi: 0.18, seed_count: 1, seed: derive(r, 1) }).unwrap();
                res.failed.len() as f64 / n as f64 > 0.5
            })
            .count();
        global as f64 / 200.0
    };
    let (low, high) = (frequency(3.0), frequency(10.0));
    outcome(
        low > 0.25 && high < 0.02,
        format!("global-cascade frequency {low:.3} at z=3 (need > 0.25), {high:.3} at z=10 (need < 0.02)"),
    )
}

fn attack_asymmetry() -> Outcome {
    let spec = GeneratorSpec::new(GeneratorKind::ConfigPowerLaw { gamma: 2.5, k_min: 2, k_max: None }, 1000, 0);
    let (mut hub, mut random) = (0.0, 0.0);
    for r in 0..20u64 {
        let g = generate(&spec.with_seed(derive(r, 0))).unwrap();
        // 0.001 of 1000 nodes: exactly one removal.
        let run = |strategy| {
            let trigger = Trigger { plan: RemovalPlan::new(strategy, derive(r, 1)), fraction: 0.001 };
            motter_lai_cascade(&g, &LoadCascadeSpec { alpha: 0.3, trigger }).unwrap()
        };
        let h = run(RemovalStrategy::TargetedStaticDegree);
        let x = run(RemovalStrategy::Random);
        assert_eq!((h.initial_count(), x.initial_count()), (1, 1));
        hub += h.survivor_fraction / 20.0;
        random += x.survivor_fraction / 20.0;
    }
    outcome(
        random - hub >= 0.1,
        format!("mean G'/G after hub removal {hub:.3}, after random removal {random:.3}, difference {:.3} (need >= 0.1)", random - hub),
    )
}

fn beta_optimum() -> Outcome {
    let spec = GeneratorSpec::new(GeneratorKind::ConfigPowerLaw { gamma: 2.5, k_min: 2, k_max: None }, 1000, 0);
    let betas = [-2.0, -1.5, -1.0, -0.5, 0.0];
    let sweep = weighted_cascade_sweep(&spec, &betas, &[0.01], 0.5, FlowModel::Current, 10, 3).unwrap();
    let at = sweep.at(0.01);
    let best = at.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let at_minus_one = at.iter().find(|p| p.0 == -1.0).unwrap().1;
    let strict = at.iter().all(|p| p.0 == -1.0 || p.1 < at_minus_one);
    let listing: Vec<String> = at.iter().map(|(b, s)| format!("{b}:{s:.4}")).collect();
    outcome(
        at_minus_one >= best,
        format!("mean G'/G by beta [{}]; beta=-1 attains the maximum {}", listing.join(" "), if strict { "strictly" } else { "(tied)" }),
    )
}

/// Power-law exponent with analytic mean degree `target` for `k_min = 2`, `k_max = n - 1`.
fn gamma_for_mean(target: f64, n: usize) -> f64 {
    let mean = |gamma| DegreeDistribution::PowerLaw { gamma, k_min: 2, k_max: n - 1 }.mean().unwrap();
    let (mut lo, mut hi) = (2.05, 4.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn interdependent_inversion() -> Outcome {
    let n = 2000;
    let gamma = gamma_for_mean(4.0, n);
    let sf = GeneratorSpec::new(GeneratorKind::ConfigPowerLaw { gamma, k_min: 2, k_max: None }, n, 0);
    let er = GeneratorSpec::new(GeneratorKind::ErdosRenyi { mean_degree: 4.0 }, n, 0);
    let p = grid(0.01, 1.0);
    let critical = |spec: &GeneratorSpec, coupling| pc_sweep(spec, spec, &p, coupling, 20, 11).unwrap().critical.unwrap_or(f64::INFINITY);
    let sf_c = critical(&sf, SweepCoupling::RandomPermutation);
    let er_c = critical(&er, SweepCoupling::RandomPermutation);
    let sf_i = critical(&sf, SweepCoupling::Isolated);
    let er_i = critical(&er, SweepCoupling::Isolated);
    outcome(
        sf_c < er_c && sf_c < sf_i && er_c < er_i,
        format!(
            "critical removal fraction: coupled scale-free (gamma {gamma:.3}) {sf_c:.3} < coupled ER {er_c:.3}; \
             isolated scale-free {sf_i:.3}, isolated ER {er_i:.3}"
        ),
    )
}

fn degeneracy_monotone() -> Outcome {
    let spec = DegeneracySpec {
        n_agents: 50,
        n_functions: 10,
        versatility_grid: (1..=10).collect(),
        capacity_grid: vec![1, 2, 3, 4],
        removal_fraction: 0.3,
        demand: FunctionDemand::uniform(10, 5).unwrap(),
        replicates: 50,
        seed: 7,
    };
    let surface = degeneracy_sweep(&spec).unwrap();
    let mut violations = Vec::new();
    let mut raw_drops = 0;
    for &c in &spec.capacity_grid {
        for v in 1..10 {
            let (lo, hi) = (surface.cell(v, c).unwrap(), surface.cell(v + 1, c).unwrap());
            let drop = lo.restored_mean - hi.restored_mean;
            if drop > 0.0 {
                raw_drops += 1;
            }
            if drop > hi.restored_std / (hi.replicates as f64).sqrt() {
                violations.push(format!("c={c} v={v}->{}", v + 1));
            }
        }
    }
    let ends: Vec<String> = spec
        .capacity_grid
        .iter()
        .map(|&c| format!("c={c}: {:.3}..{:.3}", surface.cell(1, c).unwrap().restored_mean, surface.cell(10, c).unwrap().restored_mean))
        .collect();
    outcome(
        violations.is_empty(),
        format!("restored fraction v=1..10 [{}]; {raw_drops} raw decreases, violations {violations:?}", ends.join(", ")),
    )
}

fn truth_recovery() -> Outcome {
    let ns = 30;
    let a: Vec<f64> = (0..ns).map(|i| 0.4 + 0.5 * i as f64 / 29.0).collect();
    let b: Vec<f64> = (0..ns).map(|i| 0.05 + 0.25 * ((7 * i) % 30) as f64 / 29.0).collect();
    let corrupted = ns - 1;
    let (mut covered_a, mut covered_b, mut total) = (0, 0, 0);
    let mut worst_median: f64 = 0.0;
    let mut worst_position = 0;
    for r in 0..100u64 {
        let (net, _) = synth_generate(&SynthSpec { n_claims: 1000, a: a.clone(), b: b.clone(), d: 0.5, seed: r }).unwrap();
        let est = confidence_intervals(&em_estimate(&net, &EmOptions::default()).unwrap(), &net, 0.95).unwrap();
        let mut err: Vec<f64> = est.a.iter().zip(&a).map(|(x, y)| (x - y).abs()).collect();
        err.sort_by(f64::total_cmp);
        worst_median = worst_median.max(0.5 * (err[14] + err[15]));
        for i in 0..ns {
            total += 1;
            covered_a += est.a_intervals[i].contains(a[i]) as usize;
            covered_b += est.b_intervals[i].contains(b[i]) as usize;
        }
        let flipped = em_estimate(&flip_source(&net, corrupted).unwrap(), &EmOptions::default()).unwrap();
        worst_position = worst_position.max(ns - 1 - classify_and_rerank(&flipped, 0.5).positions()[corrupted]);
    }
    let (cov_a, cov_b) = (covered_a as f64 / total as f64, covered_b as f64 / total as f64);
    let bottom_quartile = (worst_position as f64) < 0.25 * ns as f64;
    let ok = |c: f64| (0.90..=0.98).contains(&c);
    outcome(
        worst_median < 0.05 && ok(cov_a) && ok(cov_b) && bottom_quartile,
        format!(
            "worst per-replicate median |a_hat-a| {worst_median:.4} (need < 0.05); 95% coverage a {cov_a:.4} b {cov_b:.4} \
             (need [0.90, 0.98]); corrupted source at most {worst_position} places from the bottom of {ns}"
        ),
    )
}

fn oracle_equivalences() -> Outcome {
    let mut failures = Vec::new();

    let bc_worst = (0..50u64)
        .map(|s| {
            let g = common::coin_flip_graph(8, 0.4, s);
            let (fast, slow) = (betweenness(&g), common::enumerated_betweenness(&g));
            fast.iter().zip(&slow).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    if bc_worst > 1e-9 {
        failures.push(format!("betweenness off by {bc_worst:e}"));
    }

    let mut r = common::rng(99);
    let mut g_worst: f64 = 0.0;
    for s in 0..50u64 {
        let n = 2 + (s as usize % 7);
        let g = common::connected_weighted_graph(n, r.random_range(0..=n), s);
        let a = r.random_range(0..n);
        let b = (a + r.random_range(1..n)) % n;
        let (fast, slow) = (effective_conductance(&g, a, b).unwrap(), common::nodal_conductance(&g, a, b));
        g_worst = g_worst.max((fast - slow).abs() / slow);
    }
    if g_worst >= 1e-6 {
        failures.push(format!("conductance relative error {g_worst:e}"));
    }

    let mut cover_mismatch = 0;
    for s in 0..60u64 {
        let mut r = common::rng(1000 + s);
        let nf = r.random_range(2..=4);
        let na = r.random_range(1..=6);
        let agents = (0..na)
            .map(|_| {
                let size = r.random_range(1..=nf.min(3));
                let repertoire = index::sample(&mut r, nf, size).into_vec();
                Agent { repertoire, capacity: r.random_range(1..=2) }
            })
            .collect();
        let pool = AgentPool::new(nf, agents).unwrap();
        let mut required: Vec<usize> = (0..nf).map(|_| r.random_range(0..=3)).collect();
        required[0] = required[0].max(1);
        let demand = FunctionDemand::new(required).unwrap();
        let removed: Vec<usize> = (0..na).filter(|_| r.random_bool(0.3)).collect();
        let got = perturb_recover(&pool, &demand, &removed).unwrap().assignment.covered();
        if got != common::brute_force_coverage(&pool, &demand, &removed) {
            cover_mismatch += 1;
        }
    }
    if cover_mismatch > 0 {
        failures.push(format!("{cover_mismatch} buffering coverage mismatches"));
    }
    let pool = build_pool(6, 4, 2, 2, 5).unwrap();
    let demand = FunctionDemand::uniform(4, 3).unwrap();
    if perturb_recover(&pool, &demand, &[]).unwrap().assignment.covered() != common::brute_force_coverage(&pool, &demand, &[]) {
        failures.push("generated pool coverage mismatch".into());
    }

    let mut em_gap: f64 = 0.0;
    for net in common::identifiable_networks() {
        let est = em_estimate(&net, &EmOptions::default()).unwrap();
        let grid = common::likelihood_grid_search(&net, 0.1, 0.01);
        let pairs = est.a.iter().zip(&grid.a).chain(est.b.iter().zip(&grid.b)).chain([(&est.d, &grid.d)]);
        em_gap = pairs.map(|(x, y)| (x - y).abs()).fold(em_gap, f64::max);
    }
    if em_gap >= 0.02 {
        failures.push(format!("EM vs grid gap {em_gap:.4}"));
    }

    let mut worst_sigma: f64 = 0.0;
    for (topology, k) in [(RiskTopology::Tree, 3), (RiskTopology::Clique, 3), (RiskTopology::Clique, 2)] {
        for model in [PropagationModel::FractionThreshold { phi: 0.5 }, PropagationModel::AnyOneNeighbor] {
            for p0 in [0.05, 0.2] {
                let g = risk_topology(topology, 12, k).unwrap();
                let exact = failure_risk_exact(&g, &model, k, p0).unwrap();
                let mc = failure_risk_monte_carlo(&g, &model, k, p0, 20_000, 17).unwrap();
                worst_sigma = worst_sigma.max((mc.mean - exact.mean).abs() / mc.std_error);
            }
        }
    }
    if worst_sigma > 3.0 {
        failures.push(format!("risk Monte Carlo {worst_sigma:.2} sigma from exact"));
    }

    outcome(
        failures.is_empty(),
        format!(
            "betweenness max error {bc_worst:e}; conductance max relative error {g_worst:e}; coverage mismatches {cover_mismatch}; \
             EM-grid max gap {em_gap:.4}; risk MC worst {worst_sigma:.2} sigma{}",
            if failures.is_empty() { String::new() } else { format!("; FAILED: {}", failures.join(", ")) }
        ),
    )
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut differing = Vec::new();
    let mut compared = 0;
    for path in &paths {
        let scenario = Scenario::from_file(path).unwrap();
        let runs: Vec<_> = [1, 2, 4]
            .into_iter()
            .map(|jobs| {
                let dir = tempfile::tempdir().unwrap();
                run_scenario(&scenario, &RunOptions { seed: None, out_dir: dir.path().into(), jobs: Some(jobs) }).unwrap();
                csv_bytes(dir.path())
            })
            .collect();
        compared += runs[0].len();
        if runs.iter().any(|r| r != &runs[0]) || runs[0].is_empty() {
            differing.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    outcome(
        differing.is_empty() && !paths.is_empty(),
        format!("{} scenarios, {compared} CSVs, each run with 1, 2 and 4 threads; differing: {differing:?}", paths.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, f64, fn() -> Outcome); 10] = [
        ("robust-yet-fragile", 2.0, robust_yet_fragile),
        ("analytic percolation threshold", 1.0, analytic_threshold),
        ("threshold cascade window", 2.0, watts_window),
        ("load cascade attack asymmetry", 5.0, attack_asymmetry),
        ("weight exponent optimum", 10.0, beta_optimum),
        ("interdependent fragility inversion", 5.0, interdependent_inversion),
        ("degeneracy monotonicity", f64::INFINITY, degeneracy_monotone),
        ("truth discovery recovery and coverage", 2.0, truth_recovery),
        ("oracle equivalences", f64::INFINITY, oracle_equivalences),
        ("determinism", f64::INFINITY, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let out = check();
        let elapsed = started.elapsed();
        let in_time = limit.is_infinite() || elapsed < minutes(limit);
        let pass = out.pass && in_time;
        failed += !pass as usize;
        let budget = if limit.is_infinite() { String::new() } else { format!(" / {limit} min") };
        println!(
            "criterion {:>2} {}: {name} - {} [{:.1}s{budget}{}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
