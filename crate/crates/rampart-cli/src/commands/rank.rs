//! `rank`: rank the features of a CSV dataset with one estimator and write
//! per-feature results sorted by estimated rank.

use std::io::Write;
use std::path::{Path, PathBuf};

use rampart_core::{
    compute_schedule, rank_full_data, run_ramp, run_rampart, Allocation, Dataset, RampParams,
    RampartResult, Task, TrueImportance,
};

use crate::config::{Method, RankerConfig};
use crate::report::write_atomic;
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RankOpts {
    pub data: PathBuf,
    pub has_header: bool,
    pub task: Task,
    pub ranker: RankerConfig,
    pub method: Method,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub budget: usize,
    pub allocation: Allocation,
    pub seed: u64,
    /// Ground-truth importances (feature,phi[,rank] CSV); required by the
    /// oracle rankers.
    pub truth: Option<PathBuf>,
    /// When set, one CSV per halving iteration lands here.
    pub trace_dir: Option<PathBuf>,
    pub out: PathBuf,
}

/// One output line of the ranking file.
struct FeatureRow {
    feature: usize,
    hat_r: usize,
    bar_r: Option<f64>,
    count: u64,
    survived_iterations: Option<usize>,
}

pub fn cmd_rank(opts: &RankOpts) -> Result<PathBuf, CliError> {
    let dataset = Dataset::from_csv_path(&opts.data, opts.has_header, opts.task)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let m_total = dataset.n_features();

    // Argument checks before any compute.
    if opts.k == 0 || opts.k > m_total {
        return Err(CliError::Config(format!(
            "k must satisfy 1 <= k <= {m_total}, got {}",
            opts.k
        )));
    }
    if opts.method != Method::FullDataBaseline {
        if opts.n == 0 || opts.n > dataset.n_obs() {
            return Err(CliError::Config(format!(
                "n must satisfy 1 <= n <= {}, got {}",
                dataset.n_obs(),
                opts.n
            )));
        }
        if opts.m == 0 {
            return Err(CliError::Config("m must be at least 1".to_owned()));
        }
        if opts.budget == 0 {
            return Err(CliError::Config("budget must be at least 1".to_owned()));
        }
    }

    let truth = match &opts.truth {
        Some(path) => {
            let t = load_truth(path)?;
            if t.phi.len() != m_total {
                return Err(CliError::Config(format!(
                    "truth file covers {} features, dataset has {m_total}",
                    t.phi.len()
                )));
            }
            Some(t)
        }
        None => None,
    };
    let spec = opts.ranker.build(truth.as_ref())?;

    let rows = match opts.method {
        Method::FullDataBaseline => {
            eprintln!(
                "warning: full-data-baseline ignores --n, --m and --budget (one fit on all data)"
            );
            let out = rank_full_data(&dataset, &spec, opts.seed)
                .map_err(|e| CliError::Data(e.to_string()))?;
            if out.degenerate {
                eprintln!("warning: constant response; ranks fell back to index order");
            }
            (0..m_total)
                .map(|f| FeatureRow {
                    feature: f,
                    hat_r: out.ranks[f],
                    bar_r: None,
                    count: 0,
                    survived_iterations: None,
                })
                .collect::<Vec<_>>()
        }
        Method::Ramp => {
            let pool: Vec<usize> = (0..m_total).collect();
            let params = RampParams::new(opts.budget, opts.n, opts.m, opts.seed);
            let result = run_ramp(&dataset, &pool, &spec, &params)
                .map_err(|e| CliError::Data(e.to_string()))?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            (0..m_total)
                .map(|f| FeatureRow {
                    feature: f,
                    hat_r: result.hat_r[f],
                    bar_r: result.averaged.bar_r(f),
                    count: result.averaged.count(f),
                    survived_iterations: Some(1),
                })
                .collect()
        }
        Method::Rampart => {
            let schedule =
                compute_schedule(m_total, opts.k, opts.m, opts.budget, opts.allocation)
                    .map_err(|e| CliError::Config(e.to_string()))?;
            let result = run_rampart(
                &dataset, &spec, &schedule, opts.n, opts.m, opts.k, opts.seed,
            )
            .map_err(|e| CliError::Data(e.to_string()))?;
            for iteration in &result.trace {
                for w in &iteration.result.warnings {
                    eprintln!("warning: {w}");
                }
            }
            if let Some(dir) = &opts.trace_dir {
                write_trace(dir, &result)?;
            }
            rampart_rows(&result, m_total)
        }
    };

    let names = dataset.feature_names();
    let bytes = ranking_csv(&rows, names);
    write_atomic(&opts.out, &bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", opts.out.display())))?;
    Ok(opts.out.clone())
}

fn rampart_rows(result: &RampartResult, m_total: usize) -> Vec<FeatureRow> {
    let mut rows: Vec<FeatureRow> = (0..m_total)
        .map(|f| FeatureRow {
            feature: f,
            hat_r: result.hat_r[f],
            bar_r: None,
            count: 0,
            survived_iterations: Some(0),
        })
        .collect();
    for iteration in &result.trace {
        for (pos, &f) in iteration.pool.iter().enumerate() {
            rows[f].survived_iterations = rows[f].survived_iterations.map(|s| s + 1);
            // Keep the statistics from the last iteration that saw the feature.
            rows[f].bar_r = iteration.result.averaged.bar_r(pos);
            rows[f].count = iteration.result.averaged.count(pos);
        }
    }
    rows
}

fn ranking_csv(rows: &[FeatureRow], names: Option<&[String]>) -> Vec<u8> {
    let mut sorted: Vec<&FeatureRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.hat_r, r.feature));
    let mut out = Vec::new();
    writeln!(out, "feature,hat_r,bar_r,count,survived_iterations").unwrap();
    for r in sorted {
        let feature = match names {
            Some(n) => n[r.feature].clone(),
            None => r.feature.to_string(),
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            feature,
            r.hat_r,
            r.bar_r.map(|v| v.to_string()).unwrap_or_default(),
            r.count,
            r.survived_iterations
                .map(|v| v.to_string())
                .unwrap_or_default(),
        )
        .unwrap();
    }
    out
}

fn write_trace(dir: &Path, result: &RampartResult) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
    for (t, iteration) in result.trace.iter().enumerate() {
        let mut out = Vec::new();
        writeln!(out, "feature,count,bar_r,hat_r,survived").unwrap();
        for (pos, &f) in iteration.pool.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                f,
                iteration.result.averaged.count(pos),
                iteration
                    .result
                    .averaged
                    .bar_r(pos)
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
                iteration.result.hat_r[pos],
                iteration.survivors.binary_search(&f).is_ok(),
            )
            .unwrap();
        }
        let path = dir.join(format!("iteration_{:02}.csv", t + 1));
        write_atomic(&path, &out)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Reads a ground-truth file: `feature,phi[,rank]` with or without a header
/// row. Every feature id must appear exactly once.
fn load_truth(path: &Path) -> Result<TrueImportance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(CliError::Data(format!(
                "{}:{}: need feature,phi columns",
                path.display(),
                lineno + 1
            )));
        }
        let feature: usize = match fields[0].trim().parse() {
            Ok(f) => f,
            // A non-numeric first field on the first line is the header.
            Err(_) if lineno == 0 => continue,
            Err(_) => {
                return Err(CliError::Data(format!(
                    "{}:{}: cannot parse feature id '{}'",
                    path.display(),
                    lineno + 1,
                    fields[0]
                )))
            }
        };
        let phi: f64 = fields[1].trim().parse().map_err(|_| {
            CliError::Data(format!(
                "{}:{}: cannot parse phi '{}'",
                path.display(),
                lineno + 1,
                fields[1]
            ))
        })?;
        entries.push((feature, phi));
    }
    if entries.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no truth rows",
            path.display()
        )));
    }
    let max_feature = entries.iter().map(|&(f, _)| f).max().unwrap();
    let mut phi = vec![f64::NAN; max_feature + 1];
    for &(f, v) in &entries {
        if !phi[f].is_nan() {
            return Err(CliError::Data(format!(
                "{}: duplicate feature id {f}",
                path.display()
            )));
        }
        phi[f] = v;
    }
    if phi.iter().any(|v| v.is_nan()) {
        return Err(CliError::Data(format!(
            "{}: truth file must cover features 0..={max_feature} without gaps",
            path.display()
        )));
    }
    TrueImportance::from_phi(phi).map_err(|e| CliError::Data(e.to_string()))
}
