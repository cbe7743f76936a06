//! Weights → greedy path → criterion selection.

use nalgebra::DMatrix;

use crate::criteria::{select_k, CriterionTrace};
use crate::error::{Error, Result};
use crate::evaluation::Population;
use crate::greedy::{build_path_with, GreedyPath, PathOptions};
use crate::harness::config::Method;
use crate::model::{Dataset, FitResult, WeightVector};
use crate::par::Execution;
use crate::weighting::{build_weights, fit_gaussian_importance_on, ImportanceModel, ResolvedSchedule, ScheduleConfig};

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub method: Method,
    pub schedule: ResolvedSchedule,
    pub weights: WeightVector,
    pub path: GreedyPath,
    pub trace: CriterionTrace,
}

impl PipelineOutcome {
    pub fn selected_fit(&self) -> &FitResult {
        self.path.fit(self.trace.selected_k)
    }
}

/// Runs one method on one dataset. `importance` is ignored by `oga+hdic`
/// and required otherwise.
pub fn run_pipeline(
    data: &Dataset,
    method: Method,
    schedule: &ScheduleConfig,
    importance: Option<&ImportanceModel>,
    exec: Execution,
) -> Result<PipelineOutcome> {
    let resolved = schedule.resolve(data.n(), data.p(), method.schedule_mode())?;
    let weights = match method {
        Method::OgaHdic => WeightVector::uniform(data.n()),
        _ => {
            let model = importance
                .ok_or_else(|| Error::Config(format!("{method} needs an importance model")))?;
            build_weights(model, data.x(), resolved.b_n)?
        }
    };
    let path = build_path_with(
        data,
        &weights,
        resolved.k_n,
        &PathOptions {
            execution: exec,
            ..PathOptions::default()
        },
    )?;
    let trace = select_k(&path, resolved.penalty_rate(), resolved.s_a)?;
    Ok(PipelineOutcome {
        method,
        schedule: resolved,
        weights,
        path,
        trace,
    })
}

/// Importance model for a simulated draw: the exact ratio for
/// `iwoga+hdiwic`, a Gaussian fit on `coords` for `iwoga+hdiwic_s`.
pub fn simulated_importance(
    method: Method,
    pop: &Population,
    x_train: &DMatrix<f64>,
    test_inputs: &DMatrix<f64>,
    coords: &[usize],
) -> Result<Option<ImportanceModel>> {
    match method {
        Method::IwogaHdiwic => pop.importance_model().map(Some),
        Method::IwogaHdiwicS => fit_gaussian_importance_on(x_train, test_inputs, coords).map(Some),
        Method::OgaHdic => Ok(None),
    }
}
