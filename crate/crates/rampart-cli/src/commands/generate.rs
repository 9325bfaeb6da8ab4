//! `generate`: export a synthetic benchmark dataset as CSV, optionally with
//! its ground-truth importances in a sidecar file.

use std::io::Write;
use std::path::PathBuf;

use rampart_core::{gen_appendix_b, generate, Covariance, GenConfig, Scenario, SynthDataset};

use crate::report::write_atomic;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenPreset {
    /// 1000 x 160 independent Gaussian features, four signal coefficients.
    AppendixB,
}

#[derive(Debug, Clone)]
pub struct GenerateOpts {
    pub preset: Option<GenPreset>,
    pub scenario: Option<Scenario>,
    pub covariance: Covariance,
    pub gamma: Option<f64>,
    pub n_obs: Option<usize>,
    pub n_features: Option<usize>,
    pub seed: u64,
    pub header: bool,
    pub out: PathBuf,
    pub truth_out: Option<PathBuf>,
}

pub fn cmd_generate(opts: &GenerateOpts) -> Result<PathBuf, CliError> {
    let synth: SynthDataset = match opts.preset {
        Some(GenPreset::AppendixB) => gen_appendix_b(opts.seed),
        None => {
            let missing = |what: &str| {
                CliError::Config(format!("--{what} is required without --preset"))
            };
            let config = GenConfig {
                n_obs: opts.n_obs.ok_or_else(|| missing("n-obs"))?,
                n_features: opts.n_features.ok_or_else(|| missing("n-features"))?,
                covariance: opts.covariance,
                gamma: opts.gamma.ok_or_else(|| missing("gamma"))?,
                scenario: opts.scenario.ok_or_else(|| missing("scenario"))?,
                seed: opts.seed,
            };
            generate(&config).map_err(|e| CliError::Config(e.to_string()))?
        }
    };

    let mut bytes = Vec::new();
    synth
        .dataset
        .write_csv(&mut bytes, opts.header)
        .map_err(|e| CliError::Data(e.to_string()))?;
    write_atomic(&opts.out, &bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", opts.out.display())))?;

    if let Some(truth_out) = &opts.truth_out {
        let mut t = Vec::new();
        writeln!(t, "feature,phi,rank").unwrap();
        for (f, (&phi, &rank)) in synth
            .truth
            .phi
            .iter()
            .zip(synth.truth.ranks.iter())
            .enumerate()
        {
            writeln!(t, "{f},{phi},{rank}").unwrap();
        }
        write_atomic(truth_out, &t)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", truth_out.display())))?;
    }
    Ok(opts.out.clone())
}
