//! Experiment configuration files.
//!
//! One experiment per TOML file. Top-level keys: `experiment`, `master_seed`,
//! `workers`; a `[model]` table; an optional `[output]` table; and optionally
//! one parameter table named after the experiment (`[variance-scan]`, ...).
//! Every table rejects unknown keys, and every parameter has a default, so
//! `experiment = "moments"` on its own is a complete file.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{BiasLaw, Displacement, Interpolation, ModelSpec, SiteFamily};
use crate::field::JumpLaw;
use crate::linalg::Vector;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Moments,
    VarianceScan,
    PhiDecay,
    IdentityCheck,
    Fclt,
    MaxDrift,
    YchainExit,
    YchainExcursion,
    Occupation,
    Counterexample,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::Moments,
        ExperimentKind::VarianceScan,
        ExperimentKind::PhiDecay,
        ExperimentKind::IdentityCheck,
        ExperimentKind::Fclt,
        ExperimentKind::MaxDrift,
        ExperimentKind::YchainExit,
        ExperimentKind::YchainExcursion,
        ExperimentKind::Occupation,
        ExperimentKind::Counterexample,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Moments => "moments",
            ExperimentKind::VarianceScan => "variance-scan",
            ExperimentKind::PhiDecay => "phi-decay",
            ExperimentKind::IdentityCheck => "identity-check",
            ExperimentKind::Fclt => "fclt",
            ExperimentKind::MaxDrift => "max-drift",
            ExperimentKind::YchainExit => "ychain-exit",
            ExperimentKind::YchainExcursion => "ychain-excursion",
            ExperimentKind::Occupation => "occupation",
            ExperimentKind::Counterexample => "counterexample",
        }
    }

    /// Model used when the file has no `[model]` table.
    pub fn default_model(&self) -> ModelConfig {
        match self {
            ExperimentKind::Counterexample => ModelConfig { name: ModelName::FullyCorrelated, ..ModelConfig::default() },
            _ => ModelConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    #[default]
    LatticeProduct,
    FiniteRange,
    FullyCorrelated,
    Dirac,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    /// `+-e_j` with random biases.
    #[default]
    NearestNeighbor,
    /// Gaussian jumps with a random mean.
    GaussianMean,
    /// The fair nearest-neighbour law at every cell (nonrandom).
    FixedCoin,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasName {
    #[default]
    Uniform,
    TwoPoint,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisplacementName {
    #[default]
    Sign,
    Gaussian,
    Constant,
}

/// `[model]`. Defaults: the nearest-neighbour lattice model in `d = 1` with
/// biases `p ~ Uniform(0, 1)` and the random offset `U` enabled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub name: ModelName,
    pub dim: usize,
    pub family: FamilyName,
    pub bias: BiasName,
    pub bias_low: f64,
    pub bias_high: f64,
    pub uniform_offset: bool,
    /// Cell side of the finite-range model.
    pub range: f64,
    pub mean_std: f64,
    pub step_std: f64,
    pub displacement: DisplacementName,
    pub displacement_std: f64,
    pub displacement_point: Option<Vec<f64>>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            name: ModelName::LatticeProduct,
            dim: 1,
            family: FamilyName::NearestNeighbor,
            bias: BiasName::Uniform,
            bias_low: 0.0,
            bias_high: 1.0,
            uniform_offset: true,
            range: 2.0,
            mean_std: 1.0,
            step_std: 1.0,
            displacement: DisplacementName::Sign,
            displacement_std: 1.0,
            displacement_point: None,
        }
    }
}

impl ModelConfig {
    fn family(&self) -> Result<SiteFamily, ConfigError> {
        Ok(match self.family {
            FamilyName::NearestNeighbor => {
                let (low, high) = (self.bias_low, self.bias_high);
                SiteFamily::NearestNeighbor {
                    bias: match self.bias {
                        BiasName::Uniform => BiasLaw::Uniform { low, high },
                        BiasName::TwoPoint => BiasLaw::TwoPoint { low, high },
                    },
                }
            }
            FamilyName::GaussianMean => SiteFamily::GaussianMean { mean_std: self.mean_std, step_std: self.step_std },
            FamilyName::FixedCoin => {
                let w = 0.5 / self.dim as f64;
                let atoms = (0..self.dim).flat_map(|j| {
                    let e = Vector::basis(self.dim, j);
                    [(e, w), (-e, w)]
                });
                SiteFamily::Fixed(JumpLaw::atomic(atoms).map_err(|e| invalid(e.to_string()))?)
            }
        })
    }

    pub fn build(&self) -> Result<ModelSpec, ConfigError> {
        if !(1..=crate::linalg::MAX_DIM).contains(&self.dim) {
            return Err(invalid(format!("model.dim = {} outside 1..={}", self.dim, crate::linalg::MAX_DIM)));
        }
        let spec = match self.name {
            ModelName::LatticeProduct => ModelSpec::lattice_product(self.dim, self.family()?, self.uniform_offset),
            ModelName::FiniteRange => ModelSpec::finite_range(self.dim, self.range, self.family()?, Interpolation::Nearest),
            ModelName::FullyCorrelated => ModelSpec::fully_correlated(self.dim, self.family()?),
            ModelName::Dirac => {
                let displacement = match self.displacement {
                    DisplacementName::Sign => Displacement::Sign,
                    DisplacementName::Gaussian => Displacement::Gaussian { std: self.displacement_std },
                    DisplacementName::Constant => {
                        let p = self
                            .displacement_point
                            .as_ref()
                            .ok_or_else(|| invalid("model.displacement = \"constant\" needs model.displacement_point"))?;
                        if p.len() != self.dim {
                            return Err(invalid(format!("model.displacement_point has {} coordinates, dim is {}", p.len(), self.dim)));
                        }
                        Displacement::Constant(Vector::from_slice(p))
                    }
                };
                ModelSpec::dirac(self.dim, displacement)
            }
        };
        spec.map_err(|e| invalid(format!("model: {e}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into(), format: OutputFormat::Json }
    }
}

fn dyadic(from: u32, to: u32) -> Vec<usize> {
    (from..=to).map(|k| 1usize << k).collect()
}

/// `[moments]`: one-step moments from `env_replicas` environments with
/// `walks_per_env` walks each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MomentsParams {
    pub env_replicas: usize,
    pub walks_per_env: usize,
    pub tolerance_se: f64,
}

impl Default for MomentsParams {
    fn default() -> Self {
        Self { env_replicas: 100_000, walks_per_env: 1, tolerance_se: 4.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanMethodName {
    #[default]
    Exact,
    MonteCarlo,
}

/// `[variance-scan]`. `exponent_min` / `exponent_max` turn into verdicts
/// on the fitted exponent when set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VarianceScanParams {
    pub n: Vec<usize>,
    pub replicas: usize,
    pub method: MeanMethodName,
    /// Walks per environment for the Monte Carlo method.
    pub walks: usize,
    pub exponent_min: Option<f64>,
    pub exponent_max: Option<f64>,
}

impl Default for VarianceScanParams {
    fn default() -> Self {
        Self { n: dyadic(4, 12), replicas: 1000, method: MeanMethodName::Exact, walks: 10_000, exponent_min: None, exponent_max: None }
    }
}

/// `[phi-decay]`: `phi` at distances along the first axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhiParams {
    pub distances: Vec<f64>,
    pub replicas: usize,
    pub tolerance_se: f64,
}

impl Default for PhiParams {
    fn default() -> Self {
        Self { distances: vec![0.0, 1.0, 2.0, 4.0, 8.0, 16.0], replicas: 10_000, tolerance_se: 4.0 }
    }
}

/// `[identity-check]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentityParams {
    pub n: Vec<usize>,
    pub env_replicas: usize,
    pub y_replicas: usize,
    pub tolerance_se: f64,
}

impl Default for IdentityParams {
    fn default() -> Self {
        Self { n: vec![1, 4, 8], env_replicas: 4000, y_replicas: 40_000, tolerance_se: 4.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenteringName {
    #[default]
    Velocity,
    QuenchedMean,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffusionName {
    /// The averaged covariance `D`.
    #[default]
    Averaged,
    /// `D` minus the covariance of the local drift.
    Quenched,
}

/// `[fclt]`: environment seeds `0..env_seeds` of the ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FcltParams {
    pub env_seeds: usize,
    pub epsilon: f64,
    pub t: Vec<f64>,
    pub walks: usize,
    pub centering: CenteringName,
    pub diffusion: DiffusionName,
    pub alpha: f64,
    pub min_pass: usize,
    pub covariance_pairs: Vec<[f64; 2]>,
    pub covariance_tolerance_se: f64,
}

impl Default for FcltParams {
    fn default() -> Self {
        Self {
            env_seeds: 10,
            epsilon: 1.0 / 1024.0,
            t: vec![0.25, 0.5, 1.0],
            walks: 10_000,
            centering: CenteringName::Velocity,
            diffusion: DiffusionName::Averaged,
            alpha: 0.01,
            min_pass: 8,
            covariance_pairs: vec![[0.5, 1.0]],
            covariance_tolerance_se: 5.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftExpectation {
    #[default]
    Decay,
    NoDecay,
}

/// `[max-drift]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaxDriftParams {
    pub replicas: usize,
    pub n: Vec<usize>,
    pub expect: DriftExpectation,
    pub min_pass: usize,
}

impl Default for MaxDriftParams {
    fn default() -> Self {
        Self { replicas: 10, n: dyadic(6, 12), expect: DriftExpectation::Decay, min_pass: 8 }
    }
}

/// `[ychain-exit]`: exit times from `0`, the `Y_1` symmetry check, and the
/// escape probabilities over `escape_r` with budget `escape_budget_factor r^3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct YchainExitParams {
    pub r: Vec<f64>,
    pub replicas: usize,
    pub step_cap: u64,
    pub slope_min: f64,
    pub slope_max: f64,
    pub envelope: f64,
    pub symmetry_samples: usize,
    pub symmetry_alpha: f64,
    pub escape_r: Vec<f64>,
    pub escape_r0: f64,
    pub escape_budget_factor: f64,
    pub escape_replicas: usize,
}

impl Default for YchainExitParams {
    fn default() -> Self {
        Self {
            r: vec![4.0, 8.0, 16.0, 32.0],
            replicas: 20_000,
            step_cap: crate::diff_chain::DEFAULT_STEP_CAP,
            slope_min: 1.6,
            slope_max: 2.4,
            envelope: 13.0,
            symmetry_samples: 20_000,
            symmetry_alpha: 0.01,
            escape_r: vec![8.0, 16.0, 32.0],
            escape_r0: 1.0,
            escape_budget_factor: 1.0,
            escape_replicas: 200,
        }
    }
}

/// `[ychain-excursion]`. `epsilon * nominal_p` must not exceed 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExcursionParams {
    pub n: u64,
    pub epsilon: f64,
    pub nominal_p: f64,
    pub a: Vec<f64>,
    pub replicas: usize,
    pub exponent_min: f64,
    pub exponent_max: f64,
}

impl Default for ExcursionParams {
    fn default() -> Self {
        Self {
            n: 1 << 14,
            epsilon: 1.0 / 27.0,
            nominal_p: 27.0,
            a: (2..=12).map(|k| 2f64.powi(k)).collect(),
            replicas: 400,
            exponent_min: 0.35,
            exponent_max: 0.65,
        }
    }
}

/// `[occupation]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OccupationParams {
    pub n: Vec<usize>,
    pub epsilon: f64,
    pub replicas: usize,
    pub exponent_max: f64,
}

impl Default for OccupationParams {
    fn default() -> Self {
        Self { n: dyadic(6, 14), epsilon: 0.2, replicas: 400, exponent_max: 1.0 }
    }
}

/// `[counterexample]`: `B_eps` against `D` and `B~_eps` against the
/// quenched covariance, over environment seeds `0..env_seeds`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleParams {
    pub env_seeds: usize,
    pub epsilon: f64,
    pub t: Vec<f64>,
    pub walks: usize,
    pub alpha: f64,
    pub min_pass: usize,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self { env_seeds: 10, epsilon: 1.0 / 1024.0, t: vec![0.25, 0.5, 1.0], walks: 10_000, alpha: 0.01, min_pass: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentParams {
    Moments(MomentsParams),
    VarianceScan(VarianceScanParams),
    PhiDecay(PhiParams),
    IdentityCheck(IdentityParams),
    Fclt(FcltParams),
    MaxDrift(MaxDriftParams),
    YchainExit(YchainExitParams),
    YchainExcursion(ExcursionParams),
    Occupation(OccupationParams),
    Counterexample(CounterexampleParams),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    #[serde(default)]
    master_seed: u64,
    workers: Option<usize>,
    model: Option<ModelConfig>,
    #[serde(default)]
    output: OutputConfig,
    moments: Option<MomentsParams>,
    #[serde(rename = "variance-scan")]
    variance_scan: Option<VarianceScanParams>,
    #[serde(rename = "phi-decay")]
    phi_decay: Option<PhiParams>,
    #[serde(rename = "identity-check")]
    identity_check: Option<IdentityParams>,
    fclt: Option<FcltParams>,
    #[serde(rename = "max-drift")]
    max_drift: Option<MaxDriftParams>,
    #[serde(rename = "ychain-exit")]
    ychain_exit: Option<YchainExitParams>,
    #[serde(rename = "ychain-excursion")]
    ychain_excursion: Option<ExcursionParams>,
    occupation: Option<OccupationParams>,
    counterexample: Option<CounterexampleParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub master_seed: u64,
    /// Not part of the report: results do not depend on it.
    #[serde(skip)]
    pub workers: usize,
    pub model: ModelConfig,
    pub output: OutputConfig,
    pub params: ExperimentParams,
    /// The file as given, echoed into every report.
    #[serde(skip)]
    pub source: String,
}

impl ExperimentConfig {
    /// Defaults for `kind` with the given seed.
    pub fn defaults(kind: ExperimentKind, master_seed: u64) -> Self {
        parse_config(&format!("experiment = \"{}\"\nmaster_seed = {master_seed}\n", kind.name())).expect("defaults parse")
    }

    pub fn model_spec(&self) -> Result<ModelSpec, ConfigError> {
        self.model.build()
    }
}

/// Parse and validate a config file.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let present: Vec<(&str, bool)> = vec![
        ("moments", raw.moments.is_some()),
        ("variance-scan", raw.variance_scan.is_some()),
        ("phi-decay", raw.phi_decay.is_some()),
        ("identity-check", raw.identity_check.is_some()),
        ("fclt", raw.fclt.is_some()),
        ("max-drift", raw.max_drift.is_some()),
        ("ychain-exit", raw.ychain_exit.is_some()),
        ("ychain-excursion", raw.ychain_excursion.is_some()),
        ("occupation", raw.occupation.is_some()),
        ("counterexample", raw.counterexample.is_some()),
    ];
    for (name, is_present) in present {
        if is_present && name != raw.experiment.name() {
            return Err(invalid(format!("table [{name}] does not belong to experiment \"{}\"", raw.experiment.name())));
        }
    }
    let params = match raw.experiment {
        ExperimentKind::Moments => ExperimentParams::Moments(raw.moments.unwrap_or_default()),
        ExperimentKind::VarianceScan => ExperimentParams::VarianceScan(raw.variance_scan.unwrap_or_default()),
        ExperimentKind::PhiDecay => ExperimentParams::PhiDecay(raw.phi_decay.unwrap_or_default()),
        ExperimentKind::IdentityCheck => ExperimentParams::IdentityCheck(raw.identity_check.unwrap_or_default()),
        ExperimentKind::Fclt => ExperimentParams::Fclt(raw.fclt.unwrap_or_default()),
        ExperimentKind::MaxDrift => ExperimentParams::MaxDrift(raw.max_drift.unwrap_or_default()),
        ExperimentKind::YchainExit => ExperimentParams::YchainExit(raw.ychain_exit.unwrap_or_default()),
        ExperimentKind::YchainExcursion => ExperimentParams::YchainExcursion(raw.ychain_excursion.unwrap_or_default()),
        ExperimentKind::Occupation => ExperimentParams::Occupation(raw.occupation.unwrap_or_default()),
        ExperimentKind::Counterexample => ExperimentParams::Counterexample(raw.counterexample.unwrap_or_default()),
    };
    let config = ExperimentConfig {
        experiment: raw.experiment,
        master_seed: raw.master_seed,
        workers: raw.workers.unwrap_or(1).max(1),
        model: raw.model.unwrap_or_else(|| raw.experiment.default_model()),
        output: raw.output,
        params,
        source: text.to_string(),
    };
    validate(&config)?;
    Ok(config)
}

fn increasing<T: PartialOrd>(name: &str, v: &[T]) -> Result<(), ConfigError> {
    if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(format!("{name} must be a nonempty strictly increasing list")));
    }
    Ok(())
}

fn at_least(name: &str, v: usize, min: usize) -> Result<(), ConfigError> {
    if v < min {
        return Err(invalid(format!("{name} = {v}, must be at least {min}")));
    }
    Ok(())
}

fn validate(c: &ExperimentConfig) -> Result<(), ConfigError> {
    let spec = c.model_spec()?;
    let exp = c.experiment.name();
    let lattice_only = |what: &str| -> Result<(), ConfigError> {
        let atomic = matches!(c.model.family, FamilyName::NearestNeighbor | FamilyName::FixedCoin);
        let ok = match c.model.name {
            ModelName::Dirac => matches!(c.model.displacement, DisplacementName::Sign | DisplacementName::Constant),
            _ => atomic,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("{exp}: {what} needs a model with lattice jumps (exact propagation)")))
        }
    };
    match &c.params {
        ExperimentParams::Moments(p) => {
            at_least("moments.env_replicas", p.env_replicas, 2)?;
            at_least("moments.walks_per_env", p.walks_per_env, 1)?;
        }
        ExperimentParams::VarianceScan(p) => {
            increasing("variance-scan.n", &p.n)?;
            at_least("variance-scan.replicas", p.replicas, 2)?;
            if p.method == MeanMethodName::Exact {
                lattice_only("method = \"exact\"")?;
            } else {
                at_least("variance-scan.walks", p.walks, 1)?;
            }
        }
        ExperimentParams::PhiDecay(p) => {
            if p.distances.is_empty() {
                return Err(invalid("phi-decay.distances must not be empty"));
            }
            at_least("phi-decay.replicas", p.replicas, 2)?;
        }
        ExperimentParams::IdentityCheck(p) => {
            increasing("identity-check.n", &p.n)?;
            if p.n[0] == 0 {
                return Err(invalid("identity-check.n must be positive"));
            }
            at_least("identity-check.env_replicas", p.env_replicas, 2)?;
            at_least("identity-check.y_replicas", p.y_replicas, 1)?;
            lattice_only("the identity check")?;
        }
        ExperimentParams::Fclt(p) => {
            fclt_common(p.epsilon, &p.t, p.walks, p.min_pass, p.env_seeds)?;
            if p.centering == CenteringName::QuenchedMean {
                lattice_only("quenched-mean centering")?;
            }
        }
        ExperimentParams::MaxDrift(p) => {
            increasing("max-drift.n", &p.n)?;
            if p.n[0] == 0 {
                return Err(invalid("max-drift.n must be positive"));
            }
            at_least("max-drift.replicas", p.replicas, 1)?;
            if p.min_pass > p.replicas {
                return Err(invalid("max-drift.min_pass exceeds replicas"));
            }
            lattice_only("the max-drift curve")?;
        }
        ExperimentParams::YchainExit(p) => {
            increasing("ychain-exit.r", &p.r)?;
            at_least("ychain-exit.replicas", p.replicas, 2)?;
            if !p.escape_r.is_empty() {
                increasing("ychain-exit.escape_r", &p.escape_r)?;
                if p.escape_r.iter().any(|&r| r <= p.escape_r0) {
                    return Err(invalid("ychain-exit.escape_r must exceed escape_r0"));
                }
                at_least("ychain-exit.escape_replicas", p.escape_replicas, 1)?;
            }
        }
        ExperimentParams::YchainExcursion(p) => {
            increasing("ychain-excursion.a", &p.a)?;
            if !(p.epsilon > 0.0) || p.epsilon * p.nominal_p > 1.0 + 1e-12 {
                return Err(invalid(format!(
                    "ychain-excursion: need epsilon > 0 and nominal_p * epsilon <= 1, got {}",
                    p.epsilon * p.nominal_p
                )));
            }
            if p.a.iter().any(|&a| a < 1.0 || a > (p.n / 2) as f64) {
                return Err(invalid(format!("ychain-excursion.a must lie in [1, n / 2 = {}]", p.n / 2)));
            }
        }
        ExperimentParams::Occupation(p) => {
            increasing("occupation.n", &p.n)?;
            if p.n[0] == 0 || !(p.epsilon > 0.0) {
                return Err(invalid("occupation: n must be positive and epsilon > 0"));
            }
            at_least("occupation.replicas", p.replicas, 2)?;
        }
        ExperimentParams::Counterexample(p) => {
            fclt_common(p.epsilon, &p.t, p.walks, p.min_pass, p.env_seeds)?;
            lattice_only("quenched-mean centering")?;
        }
    }
    if spec.moments().is_none() {
        return Err(invalid("model has no closed-form moments"));
    }
    Ok(())
}

fn fclt_common(epsilon: f64, t: &[f64], walks: usize, min_pass: usize, seeds: usize) -> Result<(), ConfigError> {
    if !(epsilon > 0.0) || (1.0 / epsilon).floor() < 64.0 {
        return Err(invalid(format!("epsilon = {epsilon}: need [1 / epsilon] >= 64")));
    }
    if t.is_empty() || t.iter().any(|&x| !(x > 0.0)) {
        return Err(invalid("t must be a nonempty list of positive times"));
    }
    at_least("walks", walks, crate::stats::ks::MIN_KS_SAMPLE)?;
    if min_pass > seeds {
        return Err(invalid(format!("min_pass = {min_pass} exceeds env_seeds = {seeds}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("experiment = \"variance-scan\"\n").unwrap();
        assert_eq!(c.master_seed, 0);
        assert_eq!(c.model, ModelConfig::default());
        let ExperimentParams::VarianceScan(p) = &c.params else { panic!() };
        assert_eq!(p.n.first(), Some(&16));
        assert_eq!(p.n.last(), Some(&4096));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config("experiment = \"moments\"\n[model]\nname = \"dirac\"\nwobble = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("wobble"), "{msg}");
        assert!(msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn unknown_top_level_key() {
        let err = parse_config("experiment = \"moments\"\nseeed = 3\n").unwrap_err();
        assert!(err.to_string().contains("seeed"));
    }

    #[test]
    fn foreign_parameter_table_is_rejected() {
        let err = parse_config("experiment = \"moments\"\n[occupation]\nepsilon = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("[occupation]"));
    }

    #[test]
    fn unknown_experiment_and_model() {
        assert!(parse_config("experiment = \"teleport\"\n").is_err());
        assert!(parse_config("experiment = \"moments\"\n[model]\nname = \"ising\"\n").is_err());
    }

    #[test]
    fn infeasible_grids() {
        assert!(parse_config("experiment = \"max-drift\"\n[max-drift]\nn = [64, 32]\n").is_err());
        assert!(parse_config("experiment = \"fclt\"\n[fclt]\nepsilon = 0.05\n").is_err());
        assert!(parse_config("experiment = \"ychain-excursion\"\n[ychain-excursion]\nepsilon = 0.2\n").is_err());
        let gauss = "experiment = \"identity-check\"\n[model]\nfamily = \"gaussian-mean\"\n";
        assert!(parse_config(gauss).is_err());
    }

    #[test]
    fn counterexample_defaults_to_fully_correlated() {
        let c = ExperimentConfig::defaults(ExperimentKind::Counterexample, 3);
        assert_eq!(c.model.name, ModelName::FullyCorrelated);
    }

    #[test]
    fn every_kind_has_valid_defaults() {
        for k in ExperimentKind::ALL {
            ExperimentConfig::defaults(k, 1);
        }
    }
}
