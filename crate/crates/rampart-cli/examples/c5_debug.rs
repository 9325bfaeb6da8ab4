use rand::RngCore;
use rampart_core::*;

fn main() {
    // Path A: exactly what run_simulate does per trial.
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
    let cfg = rampart_cli::config::ExperimentConfig::from_toml(text).unwrap();
    for round in 0..2 {
        let rows = rampart_cli::commands::run_simulate(&cfg).unwrap();
        let misses: Vec<usize> = rows.iter()
            .filter(|r| r.method == "rampart" && !r.exact_topk)
            .map(|r| r.trial)
            .collect();
        println!("simulate path round {round}: {} misses {misses:?}", misses.len());
    }
    // Path B: direct engine calls with the same seed derivation.
    for round in 0..2 {
        let mut misses = Vec::new();
        for trial in 0..30u64 {
            let mut tr = derive_rng(2025, trial);
            let gen_seed = tr.next_u64();
            let method_seed = tr.next_u64();
            let synth = generate(&GenConfig {
                n_obs: 1000, n_features: 200,
                covariance: Covariance::Identity,
                gamma: 0.5, scenario: Scenario::LinearRegression,
                seed: gen_seed,
            }).unwrap();
            let schedule = compute_schedule(200, 10, 10, 12_000, Allocation::Uniform).unwrap();
            let res = run_rampart(&synth.dataset, &RankerSpec::OlsCoef, &schedule, 125, 10, 10, method_seed).unwrap();
            if !exact_topk(&res.hat_r, &synth.truth.ranks, 10).unwrap() { misses.push(trial); }
        }
        println!("engine path round {round}: {} misses {misses:?}", misses.len());
    }
}
