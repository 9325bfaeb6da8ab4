//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured numbers (visible under `--nocapture`).
//!
//! Criteria with hard runtime limits assert them; desk-scale trend checks
//! print their elapsed time against the stated target instead, since wall
//! clocks vary across machines.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use rampart_cli::commands::{run_simulate, run_validate_theory, TheoryOpts};
use rampart_cli::config::ExperimentConfig;
use rampart_cli::report::TheoryRow;
use rampart_core::{
    aggregate, compute_schedule, derive_rng, exact_topk, noisy_oracle_rank, rbo, run_ramp,
    run_rampart, true_ranks, Allocation, Dataset, RampParams, RankerSpec, Task,
};

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rampart-accept-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Oracle rankers never read the data, so a tiny placeholder dataset keeps
/// patch sampling cheap.
fn placeholder_dataset(n: usize, m: usize) -> Dataset {
    let x = DMatrix::from_fn(n, m, |i, j| ((i * m + j) % 5) as f64);
    let y = DVector::from_fn(n, |i, _| (i % 3) as f64);
    Dataset::new(x, y, Task::Regression).unwrap()
}

fn descending_phi(m: usize) -> Vec<f64> {
    (0..m).map(|j| (m - j) as f64).collect()
}

fn pooled_se(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

// ---------------------------------------------------------------------------
// Criterion 1: RBO matches an independent brute-force evaluation.
// ---------------------------------------------------------------------------

fn rbo_brute_force(est: &[usize], truth: &[usize], rho: f64, k: usize) -> f64 {
    let mut total = 0.0;
    for s in 1..=k {
        let a: HashSet<usize> = est[..s].iter().copied().collect();
        let b: HashSet<usize> = truth[..s].iter().copied().collect();
        total += rho.powi(s as i32 - 1) * a.intersection(&b).count() as f64 / s as f64;
    }
    (1.0 - rho) * total
}

#[test]
fn criterion_1_rbo_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = derive_rng(101, 0);
    let universe: Vec<usize> = (0..30).collect();
    let rhos = [0.5, 0.7, 0.9];
    let mut worst = 0.0f64;
    for pair in 0..10_000 {
        let k = 1 + (rng.random::<u32>() as usize) % 10;
        let len = k + (rng.random::<u32>() as usize) % 5;
        let est = rampart_core::sample_minipatch(&universe, 1, 1, len, &mut rng, pair)
            .unwrap()
            .feats;
        let truth = rampart_core::sample_minipatch(&universe, 1, 1, len, &mut rng, pair)
            .unwrap()
            .feats;
        let rho = rhos[pair % rhos.len()];
        let fast = rbo(&est, &truth, rho, k).unwrap();
        let brute = rbo_brute_force(&est, &truth, rho, k);
        worst = worst.max((fast - brute).abs());
        assert!(
            (fast - brute).abs() <= 1e-12,
            "pair {pair}: fast {fast} vs brute {brute}"
        );
    }

    let list: Vec<usize> = (0..10).collect();
    let full = rbo(&list, &list, 0.7, 10).unwrap();
    let closed_form = 1.0 - 0.7f64.powi(10);
    assert!(
        (full - closed_form).abs() <= 1e-12,
        "identical lists: {full} vs {closed_form}"
    );

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "criterion 1 runtime {elapsed:?} exceeds 10 s"
    );
    println!(
        "criterion 1: PASS (10000 pairs, max |diff| = {worst:.2e}, identical-list error = {:.2e}, {:.2}s)",
        (full - closed_form).abs(),
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: oracle exactness for both estimators, 100/100 seeded trials.
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_oracle_exactness() {
    let started = Instant::now();
    let m_total = 64;
    let k = 4;
    let truth = true_ranks(&descending_phi(m_total)).unwrap();
    let dataset = placeholder_dataset(20, m_total);
    let spec = RankerSpec::Oracle {
        true_ranks: truth.clone(),
    };

    // Halving: pools (64, 32, 16, 8), 2000 patches per iteration.
    let schedule = compute_schedule(m_total, k, 8, 8000, Allocation::Uniform).unwrap();
    assert_eq!(schedule.budgets, vec![2000; 4]);
    let mut rampart_wins = 0;
    for seed in 0..100u64 {
        let result = run_rampart(&dataset, &spec, &schedule, 10, 8, k, seed).unwrap();
        if exact_topk(&result.hat_r, &truth, k).unwrap() {
            rampart_wins += 1;
        }
    }

    let pool: Vec<usize> = (0..m_total).collect();
    let mut ramp_wins = 0;
    for seed in 0..100u64 {
        let params = RampParams::new(10_000, 10, 8, seed);
        let result = run_ramp(&dataset, &pool, &spec, &params).unwrap();
        if exact_topk(&result.hat_r, &truth, k).unwrap() {
            ramp_wins += 1;
        }
    }

    assert_eq!(rampart_wins, 100, "halving recovered {rampart_wins}/100");
    assert_eq!(ramp_wins, 100, "ensemble recovered {ramp_wins}/100");
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "criterion 2 runtime {elapsed:?} exceeds 1 min"
    );
    println!(
        "criterion 2: PASS (rampart {rampart_wins}/100, ramp {ramp_wins}/100, {:.2}s)",
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: oracle rank averages match the hypergeometric expectation.
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_hypergeometric_rank_expectation() {
    let started = Instant::now();
    let pool_size = 40;
    let m = 10;
    let truth = true_ranks(&descending_phi(pool_size)).unwrap();
    let dataset = placeholder_dataset(20, pool_size);
    let pool: Vec<usize> = (0..pool_size).collect();
    let spec = RankerSpec::Oracle {
        true_ranks: truth.clone(),
    };
    let params = RampParams::new(20_000, 10, m, 303);
    let result = run_ramp(&dataset, &pool, &spec, &params).unwrap();

    let draws = (m - 1) as f64;
    let population = (pool_size - 1) as f64;
    let mut worst_z = 0.0f64;
    for pos in 0..pool_size {
        let pi = truth[pos] as f64 / population;
        let mean = draws * pi;
        let variance = draws * pi * (1.0 - pi) * (population - draws) / (population - 1.0);
        let count = result.averaged.count(pos) as f64;
        let se = (variance / count).sqrt().max(1e-12);
        let bar = result.averaged.bar_r(pos).unwrap();
        let z = (bar - mean).abs() / se;
        worst_z = worst_z.max(z);
        assert!(
            z <= 3.0,
            "feature {pos}: bar_r {bar:.4} vs {mean:.4}, z = {z:.2}"
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "criterion 3 runtime {elapsed:?} exceeds 1 min"
    );
    println!(
        "criterion 3: PASS (40 features, worst |z| = {worst_z:.2}, {:.2}s)",
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: theory-validation trend at desk scale (200 paired trials).
// ---------------------------------------------------------------------------

fn rates(rows: &[TheoryRow], method: &str) -> Vec<(usize, f64, f64)> {
    rows.iter()
        .filter(|r| r.method == method)
        .map(|r| (r.total_minipatches, r.success_rate, r.std_error))
        .collect()
}

#[test]
fn criterion_4_appendix_trend_reproduction() {
    let started = Instant::now();
    let out = tmp_dir("criterion4").join("theory.csv");
    let rows = run_validate_theory(&TheoryOpts {
        trials: 200,
        budgets: vec![256, 1024, 4096],
        ramp_budget_multiplier: 1.0,
        master_seed: 42,
        out,
    })
    .unwrap();

    let ramp = rates(&rows, "ramp");
    let rampart = rates(&rows, "rampart");
    assert_eq!(ramp.len(), 3);
    assert_eq!(rampart.len(), 3);

    // (a) success is non-decreasing in budget, tolerance 2 pooled SE.
    for series in [&ramp, &rampart] {
        for w in series.windows(2) {
            let (_, lo_rate, lo_se) = w[0];
            let (_, hi_rate, hi_se) = w[1];
            assert!(
                hi_rate >= lo_rate - 2.0 * pooled_se(lo_se, hi_se),
                "success dropped with budget: {series:?}"
            );
        }
    }
    // (b) the halving estimator matches or beats the plain ensemble at every
    // matched budget, tolerance 2 pooled SE.
    for (r, a) in ramp.iter().zip(&rampart) {
        assert!(
            a.1 >= r.1 - 2.0 * pooled_se(r.2, a.2),
            "halving fell below the ensemble at budget {}: {:.3} vs {:.3}",
            a.0,
            a.1,
            r.1
        );
    }

    let elapsed = started.elapsed();
    println!(
        "criterion 4: PASS (ramp {:?}, rampart {:?}, {:.1}s vs 15 min target)",
        ramp.iter().map(|r| r.1).collect::<Vec<_>>(),
        rampart.iter().map(|r| r.1).collect::<Vec<_>>(),
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: reduced comparative grid, halving vs full-data baseline.
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_desk_scale_sanity() {
    let started = Instant::now();
    // Reference budget shape: 12000 total halving minipatches (5 iterations
    // of 2400 at M = 200 with the pool stopping at k = m = 10).
    let text = r#"
        master_seed = 2025
        trials = 30
        methods = ["rampart", "full-data-baseline"]

        [generator]
        n_obs = 1000
        n_features = 200
        scenarios = ["linear-regression"]
        covariances = ["identity"]
        gammas = [0.5]

        [ranker]
        kind = "ols"

        [budget]
        total = 12000
        n = 125
        m = 10
        k = 10
    "#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    let rows = run_simulate(&cfg).unwrap();

    let series = |method: &str| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.method == method)
            .map(|r| r.rbo)
            .collect()
    };
    let (rampart_mean, rampart_se) = aggregate(&series("rampart")).unwrap();
    let (baseline_mean, baseline_se) = aggregate(&series("full-data-baseline")).unwrap();

    assert!(
        rampart_mean >= 0.90,
        "halving mean RBO {rampart_mean:.4} below 0.90"
    );
    // Known-red comparison; kept as stated rather than loosened. On linear
    // truth at this signal strength the full-data fit is essentially ideal
    // (mean pinned at the RBO ceiling 1 - 0.7^10 with zero spread), while
    // patch-level fits carry omitted-variable noise: the strong ladder
    // projects onto null columns through sample correlations
    // (sd ~ sqrt(sum(beta^2)/N) ~ 0.31), so in a stable minority of datasets
    // the weakest signal feature's patch-expected coefficient drops below
    // the luckiest nulls' and no minipatch budget can recover it (checked at
    // 12k/24k/48k budgets, uniform and geometric splits: identical misses).
    // The resulting mean gap (~5e-4 RBO) is far inside any plot's resolution
    // but outside the ~2e-4 slack that 2 pooled SEs leave at 30 trials.
    assert!(
        rampart_mean >= baseline_mean - 2.0 * pooled_se(rampart_se, baseline_se),
        "halving mean RBO {rampart_mean:.6} (se {rampart_se:.6}) vs baseline {baseline_mean:.6} \
         (se {baseline_se:.6}): short of the -2 pooled SE bound by {:.2e}",
        (baseline_mean - 2.0 * pooled_se(rampart_se, baseline_se)) - rampart_mean
    );
    let elapsed = started.elapsed();
    println!(
        "criterion 5: PASS (rampart {rampart_mean:.4} +/- {rampart_se:.4}, baseline {baseline_mean:.4} +/- {baseline_se:.4}, {:.1}s vs 10 min target)",
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: byte-identical output across runs and worker counts.
// ---------------------------------------------------------------------------

fn run_binary(args: &[&str], extra: &[(&str, &Path)]) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rampart"));
    cmd.args(args);
    for (flag, path) in extra {
        cmd.arg(flag).arg(path);
    }
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "binary failed: {:?}\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn criterion_6_determinism_across_runs_and_threads() {
    let started = Instant::now();
    let dir = tmp_dir("criterion6");

    // The theory-validation command on criterion 4's configuration,
    // single-threaded vs eight workers.
    let theory = [dir.join("theory_t1.csv"), dir.join("theory_t8.csv")];
    for (path, threads) in theory.iter().zip(["1", "8"]) {
        run_binary(
            &[
                "validate-theory",
                "--trials",
                "200",
                "--budgets",
                "256,1024,4096",
                "--seed",
                "42",
                "--threads",
                threads,
            ],
            &[("--out", path)],
        );
    }
    let theory_bytes: Vec<Vec<u8>> = theory.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(
        theory_bytes[0], theory_bytes[1],
        "validate-theory differs between --threads 1 and --threads 8"
    );

    // A simulation sweep: two repeat runs plus a worker-count change.
    let cfg_path = dir.join("sim.toml");
    std::fs::write(
        &cfg_path,
        r#"
            master_seed = 77
            trials = 4
            methods = ["rampart", "ramp", "full-data-baseline"]

            [generator]
            n_obs = 400
            n_features = 80
            scenarios = ["linear-regression", "linear-classification"]
            covariances = ["ar1(0.5)"]
            gammas = [0.2]

            [ranker]
            kind = "tree-mdi"

            [budget]
            total = 600
            ramp_total = 500
            n = 100
            m = 8
            k = 8
        "#,
    )
    .unwrap();
    let sims = [
        (dir.join("sim_a.csv"), "1"),
        (dir.join("sim_b.csv"), "8"),
        (dir.join("sim_c.csv"), "8"),
    ];
    for (path, threads) in &sims {
        run_binary(
            &["simulate", "--threads", threads],
            &[("--config", cfg_path.as_path()), ("--out", path)],
        );
    }
    let sim_bytes: Vec<Vec<u8>> = sims
        .iter()
        .map(|(p, _)| std::fs::read(p).unwrap())
        .collect();
    assert_eq!(
        sim_bytes[0], sim_bytes[1],
        "simulate differs between --threads 1 and --threads 8"
    );
    assert_eq!(sim_bytes[1], sim_bytes[2], "simulate differs across runs");

    let elapsed = started.elapsed();
    println!(
        "criterion 6: PASS (validate-theory and simulate byte-identical across runs and --threads 1/8, {:.1}s)",
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: the noisy oracle's pairwise mixture rate.
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_assumption_knob_consistency() {
    let started = Instant::now();
    let true_order: Vec<usize> = (0..10).collect();
    let feats: Vec<usize> = (0..10).collect();
    let patches = 100_000;
    let mut correct = 0u32;
    for t in 0..patches {
        let mut rng = derive_rng(707, t as u64);
        let ranks = noisy_oracle_rank(&true_order, &feats, 0.8, &mut rng).unwrap();
        if ranks[1] < ranks[6] {
            correct += 1;
        }
    }
    let freq = f64::from(correct) / patches as f64;
    // Analytic mixture: 0.8 + 0.2 / 2 = 0.9.
    assert!(
        (freq - 0.9).abs() <= 0.01,
        "pairwise correct-order frequency {freq:.4} not within 0.9 +/- 0.01"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "criterion 7 runtime {elapsed:?} exceeds 30 s"
    );
    println!(
        "criterion 7: PASS (frequency {freq:.4} vs 0.9 +/- 0.01, {:.2}s)",
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: schedule trace and exact budget conservation.
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_budget_conservation_and_schedule_trace() {
    let started = Instant::now();
    let schedule = compute_schedule(500, 10, 10, 12_000, Allocation::Uniform).unwrap();
    assert_eq!(schedule.iterations(), 6, "expected 6 halving iterations");
    assert_eq!(schedule.pool_sizes, vec![500, 250, 125, 62, 31, 15]);
    assert_eq!(schedule.total_budget(), 12_000);

    let truth = true_ranks(&descending_phi(500)).unwrap();
    let dataset = placeholder_dataset(20, 500);
    let spec = RankerSpec::Oracle { true_ranks: truth };
    let result = run_rampart(&dataset, &spec, &schedule, 10, 10, 10, 8).unwrap();
    assert_eq!(
        result.total_patches, 12_000,
        "total minipatches must equal the configured budget exactly"
    );
    let elapsed = started.elapsed();
    println!(
        "criterion 8: PASS (pools {:?}, total patches {}, {:.2}s)",
        schedule.pool_sizes,
        result.total_patches,
        elapsed.as_secs_f64()
    );
}
