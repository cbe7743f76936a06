//! Declarative run configuration (TOML).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulation::{ScenarioConfig, WeightMode};
use crate::weighting::{ScheduleConfig, ScheduleMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "iwoga+hdiwic")]
    IwogaHdiwic,
    #[serde(rename = "iwoga+hdiwic_s")]
    IwogaHdiwicS,
    #[serde(rename = "oga+hdic")]
    OgaHdic,
}

impl Method {
    pub fn schedule_mode(self) -> ScheduleMode {
        match self {
            Method::OgaHdic => ScheduleMode::Oga,
            _ => ScheduleMode::Iwoga,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::IwogaHdiwic => "iwoga+hdiwic",
            Method::IwogaHdiwicS => "iwoga+hdiwic_s",
            Method::OgaHdic => "oga+hdic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iwoga+hdiwic" => Ok(Method::IwogaHdiwic),
            "iwoga+hdiwic_s" => Ok(Method::IwogaHdiwicS),
            "oga+hdic" => Ok(Method::OgaHdic),
            other => Err(Error::Config(format!(
                "unknown method `{other}` (expected iwoga+hdiwic, iwoga+hdiwic_s or oga+hdic)"
            ))),
        }
    }
}

/// Real data read from CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Header row, a `y` column, numeric covariates.
    pub train: PathBuf,
    /// Unlabeled test-domain inputs with the same covariate headers.
    #[serde(default)]
    pub test_inputs: Option<PathBuf>,
    /// Column of raw importance values in the training file, excluded from the covariates.
    #[serde(default)]
    pub weight_column: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    /// Coordinates used by the Gaussian ratio fit. Defaults to the
    /// scenario's shifted coordinate, or every column for CSV input.
    #[serde(default)]
    pub importance_coords: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConfig {
    /// Monte Carlo draws for the CPE of a misspecified population.
    #[serde(default = "default_mc_draws")]
    pub mc_draws: usize,
}

fn default_mc_draws() -> usize {
    100_000
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            mc_draws: default_mc_draws(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Training sizes; at least four distinct values.
    pub n_grid: Vec<usize>,
    /// `p = round(p_ratio · n)`.
    #[serde(default = "default_p_ratio")]
    pub p_ratio: f64,
    pub replications: usize,
}

fn default_p_ratio() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagConfig {
    /// Sizes of the test-input sample used to fit the ratio.
    #[serde(default)]
    pub estimation_sizes: Option<Vec<usize>>,
    #[serde(default = "default_diag_reps")]
    pub replications: usize,
}

fn default_diag_reps() -> usize {
    10
}

impl Default for DiagConfig {
    fn default() -> Self {
        DiagConfig {
            estimation_sizes: None,
            replications: default_diag_reps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    #[serde(default)]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default)]
    pub input: Option<InputConfig>,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub method: Option<Method>,
    #[serde(default)]
    pub weights: Option<WeightsConfig>,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub diag: Option<DiagConfig>,
}

impl HarnessConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let q_given = value
            .get("schedule")
            .and_then(|s| s.as_table())
            .is_some_and(|s| s.contains_key("q"));
        let mut cfg: HarnessConfig = value.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        if !q_given {
            if let Some(s) = &cfg.scenario {
                cfg.schedule.q = s.q_declared;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative input paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let (Some(input), Some(dir)) = (cfg.input.as_mut(), path.parent()) {
            input.train = dir.join(&input.train);
            input.test_inputs = input.test_inputs.as_ref().map(|t| dir.join(t));
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        match (&self.scenario, &self.input) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either [scenario] or [input], not both".into()))
            }
            (Some(s), None) => s.validate()?,
            _ => {}
        }
        if let Some(sweep) = &self.sweep {
            if !(sweep.p_ratio > 0.0 && sweep.p_ratio.is_finite()) {
                return Err(Error::Config(format!("p_ratio must be positive, got {}", sweep.p_ratio)));
            }
        }
        if let Some(coords) = self.weights.as_ref().and_then(|w| w.importance_coords.as_ref()) {
            if coords.is_empty() {
                return Err(Error::Config("importance_coords must not be empty".into()));
            }
        }
        Ok(())
    }

    /// The explicit method, else the one implied by the scenario's weight mode.
    pub fn resolve_method(&self, flag: Option<Method>) -> Method {
        flag.or(self.method).unwrap_or(match &self.scenario {
            Some(s) if s.weight_mode == WeightMode::Estimated => Method::IwogaHdiwicS,
            Some(_) => Method::IwogaHdiwic,
            None => Method::IwogaHdiwicS,
        })
    }

    pub fn require_scenario(&self, command: &str) -> Result<&ScenarioConfig> {
        self.scenario
            .as_ref()
            .ok_or_else(|| Error::Config(format!("`{command}` needs a [scenario] table")))
    }
}
