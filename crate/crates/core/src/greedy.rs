//! Nested IWOGA/OGA model sequences.
//!
//! Each step adds the covariate whose centered column has the largest
//! absolute weighted correlation with the current residual, then refits by
//! weighted least squares on every selected covariate. With unit weights
//! this is plain OGA.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::fit::fit_from_factor;
use crate::model::{Dataset, FitResult, GramSource, GrowingCholesky, WeightVector, WeightedDesign};
use crate::par::{dot, map_indexed, Execution};

/// Columns whose weighted variance falls below this never enter a path.
pub const MIN_COLUMN_VARIANCE: f64 = 1e-12;

/// Why a path ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum PathStop {
    Completed,
    /// Adding `index` at iteration `step` made the Gram submatrix singular.
    Singular { step: usize, index: usize },
    /// No admissible candidate was left at iteration `step`.
    Exhausted { step: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct PathOptions {
    pub execution: Execution,
    /// Refactor the Gram submatrix from scratch at every multiple of this size.
    pub refactor_every: usize,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            execution: Execution::default(),
            refactor_every: 25,
        }
    }
}

/// The nested sequence `Ĵ_1 ⊂ Ĵ_2 ⊂ …` with one fit per step.
#[derive(Debug, Clone)]
pub struct GreedyPath {
    order: Vec<usize>,
    fits: Vec<FitResult>,
    sigma2: Vec<f64>,
    weighted: bool,
    requested: usize,
    limit: usize,
    stop: PathStop,
}

impl GreedyPath {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Covariates in the order they were selected.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Model after `k` iterations (`1 ≤ k ≤ len`).
    pub fn model(&self, k: usize) -> &[usize] {
        &self.order[..k]
    }

    pub fn models(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (1..=self.len()).map(move |k| self.model(k))
    }

    pub fn fits(&self) -> &[FitResult] {
        &self.fits
    }

    /// Fit after `k` iterations.
    pub fn fit(&self, k: usize) -> &FitResult {
        &self.fits[k - 1]
    }

    pub fn sigma2_trace(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn weighted(&self) -> bool {
        self.weighted
    }

    pub fn requested(&self) -> usize {
        self.requested
    }

    /// Iteration cap after clamping `requested` to `min(p, n − 2)`.
    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn stop(&self) -> PathStop {
        self.stop
    }

    pub fn truncated(&self) -> bool {
        self.len() < self.requested
    }
}

fn best_candidate(
    design: &WeightedDesign,
    excluded: &[bool],
    u: &[f64],
    exec: Execution,
) -> Option<usize> {
    let n = design.n() as f64;
    let var = design.column_variances();
    let scores = map_indexed(exec, excluded.len(), |j| {
        (!excluded[j]).then(|| (dot(design.column(j), u) / n).abs() / var[j].sqrt())
    });
    let mut best: Option<(usize, f64)> = None;
    for (j, s) in scores.into_iter().enumerate() {
        if let Some(s) = s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((j, s));
            }
        }
    }
    best.map(|(j, _)| j)
}

fn low_variance_mask(design: &WeightedDesign) -> Vec<bool> {
    design
        .column_variances()
        .iter()
        .map(|&v| !(v >= MIN_COLUMN_VARIANCE))
        .collect()
}

/// One greedy selection against a raw residual `r_t = y_t − ŷ_t`.
///
/// Returns `None` when every remaining column is excluded or has
/// (numerically) zero weighted variance. Ties go to the smallest index.
pub fn greedy_step(
    design: &WeightedDesign,
    current: &[usize],
    residual: &[f64],
    exec: Execution,
) -> Result<Option<usize>> {
    if residual.len() != design.n() {
        return Err(Error::DimensionMismatch("residual length".into()));
    }
    let mut excluded = low_variance_mask(design);
    for &j in current {
        *excluded
            .get_mut(j)
            .ok_or_else(|| Error::Invalid(format!("index {j} out of range")))? = true;
    }
    let u: Vec<f64> = residual
        .iter()
        .zip(design.sqrt_weights())
        .map(|(r, s)| r * s)
        .collect();
    Ok(best_candidate(design, &excluded, &u, exec))
}

/// Builds the path up to `k_max` iterations with default options.
pub fn build_path(data: &Dataset, w: &WeightVector, k_max: usize) -> Result<GreedyPath> {
    build_path_with(data, w, k_max, &PathOptions::default())
}

pub fn build_path_with(
    data: &Dataset,
    w: &WeightVector,
    k_max: usize,
    opts: &PathOptions,
) -> Result<GreedyPath> {
    let design = WeightedDesign::with_execution(data, w, opts.execution)?;
    build_path_from_design(&design, k_max, opts)
}

/// Path on a precomputed design; singularity and exhaustion truncate the
/// path rather than failing.
pub fn build_path_from_design(
    design: &WeightedDesign,
    k_max: usize,
    opts: &PathOptions,
) -> Result<GreedyPath> {
    if k_max == 0 {
        return Err(Error::Invalid("k_max must be at least 1".into()));
    }
    let (n, p) = (design.n(), design.dim());
    let limit = k_max.min(p).min(n.saturating_sub(2).max(1));
    let refactor_every = opts.refactor_every.max(1);

    let mut excluded = low_variance_mask(design);
    let mut u = design.response().to_vec();
    let mut chol = GrowingCholesky::new();
    let mut rhs = Vec::with_capacity(limit);
    let mut order = Vec::with_capacity(limit);
    let mut fits = Vec::with_capacity(limit);
    let mut sigma2 = Vec::with_capacity(limit);
    let mut stop = PathStop::Completed;

    while order.len() < limit {
        let step = order.len() + 1;
        let Some(j) = best_candidate(design, &excluded, &u, opts.execution) else {
            stop = PathStop::Exhausted { step };
            break;
        };
        let extended = if step % refactor_every == 0 {
            let mut model = order.clone();
            model.push(j);
            GrowingCholesky::factor(step, |a, b| design.gram(model[a], model[b])).map(|c| chol = c)
        } else {
            let col: Vec<f64> = order.iter().map(|&i| design.gram(i, j)).collect();
            chol.push(&col, design.gram(j, j))
        };
        if extended.is_err() {
            stop = PathStop::Singular { step, index: j };
            break;
        }
        excluded[j] = true;
        order.push(j);
        rhs.push(design.cross(j));

        let mut fit = fit_from_factor(design, &order, &chol, &rhs);
        u.copy_from_slice(design.response());
        for (&i, &b) in order.iter().zip(&fit.beta) {
            for (ut, zt) in u.iter_mut().zip(design.column(i)) {
                *ut -= b * zt;
            }
        }
        let s2 = dot(&u, &u) / n as f64;
        fit.sigma2 = Some(s2);
        fits.push(fit);
        sigma2.push(s2);
    }

    Ok(GreedyPath {
        order,
        fits,
        sigma2,
        weighted: design.weighted(),
        requested: k_max,
        limit,
        stop,
    })
}
