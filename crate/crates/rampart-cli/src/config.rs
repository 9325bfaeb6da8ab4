//! Experiment configuration: a TOML file with nested sections. Unknown keys
//! are hard errors so a typo cannot silently corrupt a sweep.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use rampart_core::{Allocation, Covariance, RankerSpec, Scenario, TreeParams, TrueImportance};

use crate::CliError;

/// Which estimator to run on each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Recursive halving over a shrinking candidate pool.
    Rampart,
    /// One rank-averaging pass over the full feature set.
    Ramp,
    /// The ranking procedure applied once to the whole dataset.
    FullDataBaseline,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Rampart => "rampart",
            Method::Ramp => "ramp",
            Method::FullDataBaseline => "full-data-baseline",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rampart" => Ok(Method::Rampart),
            "ramp" => Ok(Method::Ramp),
            "full-data-baseline" => Ok(Method::FullDataBaseline),
            other => Err(format!(
                "unknown method '{other}' (expected rampart, ramp or full-data-baseline)"
            )),
        }
    }
}

/// Ranking-procedure family; hyperparameters live in [`RankerConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankerKind {
    Ols,
    Logistic,
    TreeMdi,
    Oracle,
    NoisyOracle,
}

impl FromStr for RankerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ols" => Ok(RankerKind::Ols),
            "logistic" => Ok(RankerKind::Logistic),
            "tree-mdi" => Ok(RankerKind::TreeMdi),
            "oracle" => Ok(RankerKind::Oracle),
            "noisy-oracle" => Ok(RankerKind::NoisyOracle),
            other => Err(format!(
                "unknown ranker '{other}' (expected ols, logistic, tree-mdi, oracle or noisy-oracle)"
            )),
        }
    }
}

pub fn parse_covariance(s: &str) -> Result<Covariance, String> {
    if s == "identity" {
        return Ok(Covariance::Identity);
    }
    if let Some(inner) = s.strip_prefix("ar1(").and_then(|r| r.strip_suffix(')')) {
        let rho: f64 = inner
            .trim()
            .parse()
            .map_err(|_| format!("cannot parse AR(1) correlation '{inner}'"))?;
        let cov = Covariance::Ar1 { rho };
        cov.validate().map_err(|e| e.to_string())?;
        return Ok(cov);
    }
    Err(format!(
        "unknown covariance '{s}' (expected identity or ar1(rho))"
    ))
}

pub fn parse_scenario(s: &str) -> Result<Scenario, String> {
    match s {
        "linear-regression" => Ok(Scenario::LinearRegression),
        "nonlinear-regression" => Ok(Scenario::NonlinearRegression),
        "linear-classification" => Ok(Scenario::LinearClassification),
        "nonlinear-classification" => Ok(Scenario::NonlinearClassification),
        other => Err(format!(
            "unknown scenario '{other}' (expected linear-regression, nonlinear-regression, \
             linear-classification or nonlinear-classification)"
        )),
    }
}

pub fn parse_allocation(s: &str) -> Result<Allocation, String> {
    match s {
        "uniform" => Ok(Allocation::Uniform),
        "geometric" => Ok(Allocation::Geometric),
        other => Err(format!(
            "unknown allocation '{other}' (expected uniform or geometric)"
        )),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(try_from = "String")]
pub struct CovarianceSpec(pub Covariance);

impl TryFrom<String> for CovarianceSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        parse_covariance(&s).map(CovarianceSpec)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(try_from = "String")]
pub struct ScenarioSpec(pub Scenario);

impl TryFrom<String> for ScenarioSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        parse_scenario(&s).map(ScenarioSpec)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(try_from = "String")]
pub struct AllocationSpec(pub Allocation);

impl TryFrom<String> for AllocationSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        parse_allocation(&s).map(AllocationSpec)
    }
}

fn default_rho() -> f64 {
    0.7
}

/// Top-level simulation config.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub trials: usize,
    /// Output CSV path; `--out` on the command line takes precedence.
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    pub methods: Vec<Method>,
    /// Persistence parameter of the rank-biased overlap score.
    #[serde(default = "default_rho")]
    pub rbo_rho: f64,
    pub generator: GeneratorGrid,
    pub ranker: RankerConfig,
    pub budget: BudgetConfig,
}

/// Cartesian generator grid: every scenario x covariance x gamma becomes one
/// grid point, evaluated for every trial.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorGrid {
    pub n_obs: usize,
    pub n_features: usize,
    pub scenarios: Vec<ScenarioSpec>,
    pub covariances: Vec<CovarianceSpec>,
    pub gammas: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankerConfig {
    pub kind: RankerKind,
    /// Gradient-descent iterations (logistic only).
    #[serde(default)]
    pub iterations: Option<usize>,
    /// Gradient-descent step size (logistic only).
    #[serde(default)]
    pub step_size: Option<f64>,
    /// Maximum tree depth (tree-mdi only).
    #[serde(default)]
    pub max_depth: Option<usize>,
    /// Minimum node size eligible for a split (tree-mdi only).
    #[serde(default)]
    pub min_samples_split: Option<usize>,
    /// Per-patch probability of emitting the exact order (noisy-oracle only).
    #[serde(default)]
    pub p_correct: Option<f64>,
}

impl RankerConfig {
    pub fn from_kind(kind: RankerKind) -> Self {
        Self {
            kind,
            iterations: None,
            step_size: None,
            max_depth: None,
            min_samples_split: None,
            p_correct: None,
        }
    }

    /// Rejects hyperparameters that do not belong to the chosen kind.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut stray: Vec<&str> = Vec::new();
        if self.iterations.is_some() && self.kind != RankerKind::Logistic {
            stray.push("iterations");
        }
        if self.step_size.is_some() && self.kind != RankerKind::Logistic {
            stray.push("step_size");
        }
        if self.max_depth.is_some() && self.kind != RankerKind::TreeMdi {
            stray.push("max_depth");
        }
        if self.min_samples_split.is_some() && self.kind != RankerKind::TreeMdi {
            stray.push("min_samples_split");
        }
        if self.p_correct.is_some() && self.kind != RankerKind::NoisyOracle {
            stray.push("p_correct");
        }
        if !stray.is_empty() {
            return Err(CliError::Config(format!(
                "ranker option(s) {stray:?} do not apply to kind '{:?}'",
                self.kind
            )));
        }
        if self.kind == RankerKind::NoisyOracle && self.p_correct.is_none() {
            return Err(CliError::Config(
                "noisy-oracle requires p_correct".to_owned(),
            ));
        }
        Ok(())
    }

    /// Builds the runtime spec; oracle kinds embed the trial's ground truth.
    pub fn build(&self, truth: Option<&TrueImportance>) -> Result<RankerSpec, CliError> {
        self.validate()?;
        let defaults = TreeParams::default();
        let spec = match self.kind {
            RankerKind::Ols => RankerSpec::OlsCoef,
            RankerKind::Logistic => RankerSpec::LogisticCoef {
                iterations: self.iterations.unwrap_or(200),
                step_size: self.step_size.unwrap_or(0.1),
            },
            RankerKind::TreeMdi => RankerSpec::TreeMdi {
                max_depth: self.max_depth.unwrap_or(defaults.max_depth),
                min_samples_split: self
                    .min_samples_split
                    .unwrap_or(defaults.min_samples_split),
            },
            RankerKind::Oracle | RankerKind::NoisyOracle => {
                let truth = truth.ok_or_else(|| {
                    CliError::Config(
                        "oracle rankers need ground-truth importances (supply --truth)".to_owned(),
                    )
                })?;
                match self.kind {
                    RankerKind::Oracle => RankerSpec::Oracle {
                        true_ranks: truth.ranks.clone(),
                    },
                    _ => RankerSpec::NoisyOracle {
                        true_ranks: truth.ranks.clone(),
                        p_correct: self.p_correct.expect("validated above"),
                    },
                }
            }
        };
        spec.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    /// Total minipatches for the halving estimator (split across iterations).
    pub total: usize,
    /// Total minipatches for the plain ensemble; defaults to `total`.
    #[serde(default)]
    pub ramp_total: Option<usize>,
    #[serde(default = "default_allocation")]
    pub allocation: AllocationSpec,
    /// Observations per minipatch.
    pub n: usize,
    /// Features per minipatch.
    pub m: usize,
    /// Size of the target top-k.
    pub k: usize,
}

fn default_allocation() -> AllocationSpec {
    AllocationSpec(Allocation::Uniform)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".to_owned()));
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("methods must be nonempty".to_owned()));
        }
        let g = &self.generator;
        if g.scenarios.is_empty() || g.covariances.is_empty() || g.gammas.is_empty() {
            return Err(CliError::Config(
                "generator grid lists must be nonempty".to_owned(),
            ));
        }
        if g.gammas.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(CliError::Config("gammas must be positive".to_owned()));
        }
        if !(self.rbo_rho > 0.0 && self.rbo_rho < 1.0) {
            return Err(CliError::Config(format!(
                "rbo_rho must lie strictly between 0 and 1, got {}",
                self.rbo_rho
            )));
        }
        if self.budget.k == 0 || self.budget.k > g.n_features {
            return Err(CliError::Config(format!(
                "budget.k must satisfy 1 <= k <= {}, got {}",
                g.n_features, self.budget.k
            )));
        }
        if self.budget.n == 0 || self.budget.n > g.n_obs {
            return Err(CliError::Config(format!(
                "budget.n must satisfy 1 <= n <= {}, got {}",
                g.n_obs, self.budget.n
            )));
        }
        if self.budget.m == 0 {
            return Err(CliError::Config("budget.m must be at least 1".to_owned()));
        }
        if self.budget.total == 0 || self.budget.ramp_total == Some(0) {
            return Err(CliError::Config(
                "minipatch budgets must be at least 1".to_owned(),
            ));
        }
        self.ranker.validate()?;
        Ok(())
    }
}
