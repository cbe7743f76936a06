//! Config-driven commands behind the command-line tool.

pub mod commands;
pub mod config;
pub mod io;
pub mod pipeline;
pub mod records;

pub use commands::{
    cmd_fit, cmd_rate_sweep, cmd_simulate, cmd_weights_diag, ols_slope, save_fit, save_sweep, save_weights_diag,
    weight_diagnostics, CommandOptions,
};
pub use config::{DiagConfig, EvaluationConfig, HarnessConfig, InputConfig, Method, SweepConfig, WeightsConfig};
pub use pipeline::{run_pipeline, simulated_importance, PipelineOutcome};
pub use records::*;
