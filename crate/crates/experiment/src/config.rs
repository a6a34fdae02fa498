//! TOML experiment description.

use std::fmt;
use std::path::{Path, PathBuf};

use dmsrl_core::dms::DmsConfig;
use dmsrl_core::learners::GraceParams;
use dmsrl_core::mdp::{AlphaRule, EpsilonRule, LearningSchedule};
use dmsrl_core::trace::{Segment, SynthParams};
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Name used in comparison tables and plot legends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub dms: DmsConfig,
    #[serde(default)]
    pub trace: TraceConfig,
    pub learner: LearnerConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Centralized,
    Layered,
    BestResponseApp,
    BestResponseOs,
    VirtualEt,
    TdLambda,
    Grace,
    OracleGreedy,
}

impl Algorithm {
    pub fn id(self) -> &'static str {
        match self {
            Self::Centralized => "centralized",
            Self::Layered => "layered",
            Self::BestResponseApp => "best-response-app",
            Self::BestResponseOs => "best-response-os",
            Self::VirtualEt => "virtual-et",
            Self::TdLambda => "td-lambda",
            Self::Grace => "grace",
            Self::OracleGreedy => "oracle-greedy",
        }
    }

    /// Whether the controller itself needs the solved model.
    pub fn needs_oracle(self) -> bool {
        matches!(
            self,
            Self::BestResponseApp | Self::BestResponseOs | Self::OracleGreedy
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub algorithm: Algorithm,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: EpsilonRule,
    #[serde(default = "default_alpha")]
    pub alpha: AlphaRule,
    /// Extra backups per slot for virtual-et and td-lambda.
    #[serde(default)]
    pub psi: usize,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub grace: GraceParams,
}

fn default_gamma() -> f64 {
    LearningSchedule::default().gamma
}

fn default_epsilon() -> EpsilonRule {
    LearningSchedule::default().epsilon
}

fn default_alpha() -> AlphaRule {
    LearningSchedule::default().alpha
}

fn default_lambda() -> f64 {
    0.8
}

impl LearnerConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            gamma: default_gamma(),
            epsilon: default_epsilon(),
            alpha: default_alpha(),
            psi: 0,
            lambda: default_lambda(),
            grace: GraceParams::default(),
        }
    }

    pub fn schedule(&self) -> LearningSchedule {
        LearningSchedule {
            alpha: self.alpha,
            epsilon: self.epsilon,
            gamma: self.gamma,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TraceConfig {
    /// I.i.d. synthetic data units; the built-in video-like table by default.
    Synthetic {
        #[serde(default = "SynthParams::default_video")]
        params: SynthParams,
    },
    /// Piecewise-stationary synthetic trace.
    NonStationary { segments: Vec<SegmentConfig> },
    /// A recorded trace in CSV form.
    Csv {
        path: PathBuf,
        #[serde(default)]
        mode: CsvMode,
    },
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self::Synthetic {
            params: SynthParams::default_video(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub duration: u64,
    /// Multiplier on every complexity distribution of `params`.
    #[serde(default = "unit")]
    pub complexity_scale: f64,
    #[serde(default = "SynthParams::default_video")]
    pub params: SynthParams,
}

fn unit() -> f64 {
    1.0
}

impl SegmentConfig {
    pub fn resolve(&self) -> Segment {
        Segment {
            duration: self.duration,
            params: self.params.scaled_complexity(self.complexity_scale),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsvMode {
    /// Loop over the recorded samples of each type in order.
    #[default]
    Replay,
    /// Draw uniformly among the recorded samples of each type.
    Resample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HorizonPreset {
    Short,
    Medium,
    Long,
}

impl HorizonPreset {
    pub fn slots(self) -> u64 {
        match self {
            Self::Short => 20_000,
            Self::Medium => 64_000,
            Self::Long => 192_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Horizon {
    Slots(u64),
    Preset(HorizonPreset),
}

impl Horizon {
    pub fn slots(self) -> u64 {
        match self {
            Self::Slots(n) => n,
            Self::Preset(p) => p.slots(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_horizon")]
    pub horizon: Horizon,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Slots between snapshots of the learner's value estimate; 0 keeps only
    /// the final one.
    #[serde(default = "default_checkpoint_interval")]
    pub checkpoint_interval: u64,
}

fn default_horizon() -> Horizon {
    Horizon::Preset(HorizonPreset::Short)
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_checkpoint_interval() -> u64 {
    dmsrl_core::metrics::DEFAULT_CHECKPOINT_INTERVAL
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            horizon: default_horizon(),
            seeds: default_seeds(),
            checkpoint_interval: default_checkpoint_interval(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub enabled: bool,
    pub value_tolerance: f64,
    pub stationary_tolerance: f64,
    /// Data units drawn from the trace source to estimate the exact model.
    pub reference_samples: usize,
    pub reference_seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            value_tolerance: dmsrl_core::mdp::DEFAULT_VI_TOL,
            stationary_tolerance: 1e-12,
            reference_samples: 300_000,
            reference_seed: 0x000b_ac1e,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write one per-slot CSV per seed.
    pub per_slot: bool,
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            per_slot: true,
            plots: true,
        }
    }
}

impl ExperimentConfig {
    pub fn new(learner: LearnerConfig) -> Self {
        Self {
            label: None,
            dms: DmsConfig::default(),
            trace: TraceConfig::default(),
            learner,
            run: RunConfig::default(),
            oracle: OracleConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            ExperimentError::Config(m) => {
                ExperimentError::Config(format!("{}: {m}", path.display()))
            }
            other => other,
        })
    }

    /// The fully resolved configuration, presets expanded.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        c.run.horizon = Horizon::Slots(self.run.horizon.slots());
        c.label = Some(self.label());
        c
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match self.learner.algorithm {
            Algorithm::VirtualEt | Algorithm::TdLambda => {
                format!("{} psi={}", self.learner.algorithm, self.learner.psi)
            }
            a => a.to_string(),
        }
    }

    pub fn horizon(&self) -> u64 {
        self.run.horizon.slots()
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err =
            |field: &str, e: dmsrl_core::Error| ExperimentError::Config(format!("{field}: {e}"));
        self.dms.validate().map_err(|e| cfg_err("dms", e))?;
        self.learner
            .schedule()
            .validate()
            .map_err(|e| cfg_err("learner", e))?;
        self.learner
            .grace
            .validate()
            .map_err(|e| cfg_err("learner.grace", e))?;
        if !(0.0..=1.0).contains(&self.learner.lambda) {
            return Err(ExperimentError::Config(format!(
                "learner.lambda: {} outside [0, 1]",
                self.learner.lambda
            )));
        }
        if self.horizon() == 0 {
            return Err(ExperimentError::Config(
                "run.horizon: must be at least 1 slot".into(),
            ));
        }
        if self.run.seeds.is_empty() {
            return Err(ExperimentError::Config(
                "run.seeds: at least one seed is required".into(),
            ));
        }
        let (nz, nh) = (self.dms.n_types(), self.dms.n_configs);
        let check_params = |field: &str, p: &SynthParams| -> Result<()> {
            p.validate().map_err(|e| cfg_err(field, e))?;
            if p.n_types() != nz || p.n_configs() != nh {
                return Err(ExperimentError::Config(format!(
                    "{field}: {} types x {} configs, the system has {nz} x {nh}",
                    p.n_types(),
                    p.n_configs()
                )));
            }
            Ok(())
        };
        match &self.trace {
            TraceConfig::Synthetic { params } => check_params("trace.params", params)?,
            TraceConfig::NonStationary { segments } => {
                if segments.is_empty() {
                    return Err(ExperimentError::Config(
                        "trace.segments: at least one segment is required".into(),
                    ));
                }
                for (i, s) in segments.iter().enumerate() {
                    if s.duration == 0
                        || !(s.complexity_scale > 0.0 && s.complexity_scale.is_finite())
                    {
                        return Err(ExperimentError::Config(format!(
                            "trace.segments[{i}]: duration and complexity_scale must be positive"
                        )));
                    }
                    check_params(&format!("trace.segments[{i}].params"), &s.params)?;
                }
            }
            TraceConfig::Csv { .. } => {}
        }
        let o = &self.oracle;
        if !(o.value_tolerance > 0.0) || !(o.stationary_tolerance > 0.0) {
            return Err(ExperimentError::Config(
                "oracle: tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Parses `"1,2,3"`.
pub fn parse_seed_list(s: &str) -> Result<Vec<u64>> {
    let seeds = s
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| ExperimentError::Config(format!("seeds: {e}")))?;
    if seeds.is_empty() {
        return Err(ExperimentError::Config("seeds: empty list".into()));
    }
    Ok(seeds)
}
