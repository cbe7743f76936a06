use serde::{Deserialize, Serialize};

use super::cholesky::GrowingCholesky;
use super::data::{Dataset, WeightVector};
use super::moments::GramSource;
use crate::error::{Error, Result};

/// Weighted least-squares fit on an index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: Vec<usize>,
    pub alpha: f64,
    pub beta: Vec<f64>,
    /// Weighted residual variance, filled by [`residual_sigma2`] or the path builder.
    pub sigma2: Option<f64>,
    pub weighted: bool,
}

impl FitResult {
    /// `beta` embedded into a length-`p` vector with zeros off the model.
    pub fn dense_beta(&self, p: usize) -> Vec<f64> {
        let mut out = vec![0.0; p];
        for (&j, &b) in self.model.iter().zip(&self.beta) {
            out[j] = b;
        }
        out
    }
}

pub(crate) fn check_model(model: &[usize], p: usize) -> Result<()> {
    if model.is_empty() || model.len() > p {
        return Err(Error::Invalid(format!(
            "model size {} outside [1, {p}]",
            model.len()
        )));
    }
    let mut seen = vec![false; p];
    for &j in model {
        if j >= p || std::mem::replace(&mut seen[j], true) {
            return Err(Error::Invalid(format!("bad or repeated index {j} in model")));
        }
    }
    Ok(())
}

/// `β̂(J) = Σ̂_{J,J}⁻¹ ŝ_J`, `α̂(J) = μ̂_y − β̂ᵀ μ̂_J`.
pub fn wls_fit<G: GramSource + ?Sized>(moments: &G, model: &[usize]) -> Result<FitResult> {
    check_model(model, moments.dim())?;
    let chol = GrowingCholesky::factor(model.len(), |a, b| moments.gram(model[a], model[b]))
        .map_err(|_| Error::SingularModel {
            model: model.to_vec(),
        })?;
    let rhs: Vec<f64> = model.iter().map(|&j| moments.cross(j)).collect();
    Ok(fit_from_factor(moments, model, &chol, &rhs))
}

pub(crate) fn fit_from_factor<G: GramSource + ?Sized>(
    moments: &G,
    model: &[usize],
    chol: &GrowingCholesky,
    rhs: &[f64],
) -> FitResult {
    let beta = chol.solve(rhs);
    let alpha = moments.mu_y()
        - model
            .iter()
            .zip(&beta)
            .map(|(&j, b)| b * moments.mu_x(j))
            .sum::<f64>();
    FitResult {
        model: model.to_vec(),
        alpha,
        beta,
        sigma2: None,
        weighted: moments.weighted(),
    }
}

/// `(1/n) Σ w_t (y_t − α̂ − β̂ᵀ x_{t,J})²`.
pub fn residual_sigma2(data: &Dataset, w: &WeightVector, fit: &FitResult) -> Result<f64> {
    let n = data.n();
    if w.len() != n {
        return Err(Error::DimensionMismatch("weights vs observations".into()));
    }
    check_model(&fit.model, data.p())?;
    if fit.beta.len() != fit.model.len() {
        return Err(Error::DimensionMismatch("beta vs model".into()));
    }
    let mut resid: Vec<f64> = data.y().iter().map(|y| y - fit.alpha).collect();
    for (&j, &b) in fit.model.iter().zip(&fit.beta) {
        for (r, x) in resid.iter_mut().zip(data.column(j)) {
            *r -= b * x;
        }
    }
    let s: f64 = resid.iter().zip(w.as_slice()).map(|(r, wt)| wt * r * r).sum();
    Ok(s / n as f64)
}

/// `α̂ + β̂ᵀ x_J` for a full-length covariate vector.
pub fn predict(fit: &FitResult, x: &[f64]) -> f64 {
    fit.alpha
        + fit
            .model
            .iter()
            .zip(&fit.beta)
            .map(|(&j, b)| b * x[j])
            .sum::<f64>()
}
