//! Serializable results of the harness commands.

use serde::{Deserialize, Serialize};

use crate::greedy::PathStop;
use crate::harness::config::Method;
use crate::simulation::ScenarioConfig;
use crate::weighting::{ResolvedSchedule, ScheduleConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub train: String,
    pub test_inputs: Option<String>,
    pub weight_column: Option<String>,
    pub n: usize,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub library_version: String,
    pub method: Method,
    pub seed: Option<u64>,
    pub scenario: Option<ScenarioConfig>,
    pub input: Option<InputDescriptor>,
    pub schedule: ResolvedSchedule,
    pub selected_k: usize,
    /// Selected covariates in entry order (0-based).
    pub selected_model: Vec<usize>,
    pub selected_names: Option<Vec<String>>,
    pub alpha: f64,
    pub beta: Vec<f64>,
    /// Present when the population is known.
    pub mcpe: Option<f64>,
    pub cpe: Option<f64>,
    /// Standard error of `cpe` when it was estimated by Monte Carlo.
    pub cpe_std_error: Option<f64>,
    pub path_stop: PathStop,
    pub path_order: Vec<usize>,
    pub sigma2_trace: Vec<f64>,
    pub criterion_trace: Vec<f64>,
    pub wall_time_ms: u64,
}

/// One replication of one sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub cell: usize,
    pub n: usize,
    pub p: usize,
    pub replication: usize,
    pub seed: u64,
    pub selected_k: Option<usize>,
    pub k_n: Option<usize>,
    pub mcpe: Option<f64>,
    pub cpe: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub n: usize,
    pub p: usize,
    pub c_n: f64,
    pub d_n: f64,
    pub b_n: f64,
    pub k_n: usize,
    /// `d_n` for IWOGA, `c_n` for OGA.
    pub rate: f64,
    pub mean_mcpe: f64,
    pub se: f64,
    pub mean_cpe: f64,
    pub cpe_se: f64,
    pub mean_selected_k: f64,
    pub ok_replications: usize,
    pub failed_replications: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub std_error: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorMetric {
    Mcpe,
    Cpe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSweepResult {
    pub library_version: String,
    pub method: Method,
    pub scenario: ScenarioConfig,
    pub schedule: ScheduleConfig,
    pub replications: usize,
    pub grid: Vec<(usize, usize)>,
    pub rate_axis: String,
    /// Error averaged per cell and regressed on the rate.
    pub metric: ErrorMetric,
    pub cells: Vec<SweepCell>,
    pub slope: Option<SlopeFit>,
    pub slope_skipped: Option<String>,
    /// `(1+2ξ)/(1+ξ)`.
    pub target_exponent: f64,
    /// `2ξ/(1+ξ)`.
    pub degraded_exponent: f64,
    pub outcomes: Vec<ReplicationOutcome>,
    pub wall_time_ms: u64,
}

impl RateSweepResult {
    pub fn metric_means(&self) -> Vec<f64> {
        self.cells
            .iter()
            .map(|c| match self.metric {
                ErrorMetric::Mcpe => c.mean_mcpe,
                ErrorMetric::Cpe => c.mean_cpe,
            })
            .collect()
    }

    /// Metric values of the successful replications of a cell.
    pub fn cell_values(&self, cell: usize) -> Vec<f64> {
        self.outcomes
            .iter()
            .filter(|o| o.cell == cell)
            .filter_map(|o| match self.metric {
                ErrorMetric::Mcpe => o.mcpe,
                ErrorMetric::Cpe => o.cpe,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightDiagnostics {
    /// `max_t |ŵ_t − w_t|` on normalized weights.
    pub max_weight_diff: f64,
    /// `max_{i,j} |(1/n) Σ_t (v_t − v̂_t) x_ti x_tj|` with an intercept column.
    pub gram_stat: f64,
    /// `max_j |(1/n) Σ_t (v_t − v̂_t) x_tj ε_t|` with an intercept column.
    pub noise_stat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagReplication {
    pub n_estimation: usize,
    pub replication: usize,
    pub seed: u64,
    pub max_weight_diff: f64,
    pub gram_over_dn: f64,
    pub noise_over_dn: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagSummary {
    pub n_estimation: usize,
    pub median_max_weight_diff: f64,
    pub median_gram_over_dn: f64,
    pub median_noise_over_dn: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsDiagReport {
    pub library_version: String,
    pub scenario: ScenarioConfig,
    pub schedule: ResolvedSchedule,
    pub importance_coords: Vec<usize>,
    pub summaries: Vec<DiagSummary>,
    pub replications: Vec<DiagReplication>,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub library_version: String,
    pub scenario: ScenarioConfig,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub n_test: usize,
    pub files: Vec<String>,
}
