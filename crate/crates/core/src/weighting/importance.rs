use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{ensure_finite, Error, Result};
use crate::model::WeightVector;

/// Smallest-to-largest eigenvalue ratio a covariance must exceed.
const SPD_RATIO: f64 = 1e-10;
const RIDGE_SCALE: f64 = 1e-8;

type RatioFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// User-supplied density ratio `x ↦ w(x)`.
#[derive(Clone)]
pub struct KnownImportance(Arc<RatioFn>);

impl KnownImportance {
    pub fn new<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        KnownImportance(Arc::new(f))
    }
}

impl fmt::Debug for KnownImportance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("KnownImportance(..)")
    }
}

/// Multivariate normal law with a cached Cholesky factor.
#[derive(Debug, Clone)]
pub struct GaussianLaw {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol_l: DMatrix<f64>,
    log_det: f64,
}

fn check_spd(cov: &DMatrix<f64>) -> bool {
    if cov.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let eig = SymmetricEigen::new(cov.clone()).eigenvalues;
    let max = eig.max();
    let min = eig.min();
    max > 0.0 && min > SPD_RATIO * max
}

impl GaussianLaw {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let k = mean.len();
        if cov.shape() != (k, k) || k == 0 {
            return Err(Error::DimensionMismatch(format!(
                "mean of length {k} with covariance {:?}",
                cov.shape()
            )));
        }
        ensure_finite(mean.as_slice(), "Gaussian mean")?;
        if !check_spd(&cov) {
            return Err(Error::NotPositiveDefinite(
                "covariance fails the eigenvalue-ratio check".into(),
            ));
        }
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))?;
        let chol_l = chol.l();
        let log_det = 2.0 * chol_l.diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(GaussianLaw {
            mean,
            cov,
            chol_l,
            log_det,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Log density without the `-(k/2) log 2π` constant.
    pub fn log_kernel(&self, x: &[f64]) -> f64 {
        let k = self.dim();
        // forward substitution L z = x - μ
        let mut z = vec![0.0; k];
        for i in 0..k {
            let mut s = x[i] - self.mean[i];
            for m in 0..i {
                s -= self.chol_l[(i, m)] * z[m];
            }
            z[i] = s / self.chol_l[(i, i)];
        }
        -0.5 * (self.log_det + z.iter().map(|v| v * v).sum::<f64>())
    }

    /// Maximum-likelihood fit (`1/n` covariance) on the given columns,
    /// ridge-regularized once if the covariance is ill-conditioned.
    pub fn fit(x: &DMatrix<f64>, coords: &[usize]) -> Result<Self> {
        let (n, k) = (x.nrows(), coords.len());
        if n < k + 1 {
            return Err(Error::Invalid(format!(
                "Gaussian fit in {k} dimensions needs at least {} rows, got {n}",
                k + 1
            )));
        }
        let sub = DMatrix::from_fn(n, k, |t, a| x[(t, coords[a])]);
        ensure_finite(sub.as_slice(), "importance-fit sample")?;
        let mean = DVector::from_fn(k, |a, _| sub.column(a).sum() / n as f64);
        let centered = DMatrix::from_fn(n, k, |t, a| sub[(t, a)] - mean[a]);
        let mut cov = (centered.transpose() * &centered) / n as f64;
        cov = (&cov + cov.transpose()) * 0.5;
        if !check_spd(&cov) {
            let ridge = RIDGE_SCALE * cov.trace() / k as f64;
            for a in 0..k {
                cov[(a, a)] += ridge;
            }
        }
        GaussianLaw::new(mean, cov).map_err(|e| match e {
            Error::NotPositiveDefinite(m) => {
                Error::NotPositiveDefinite(format!("degenerate covariance after ridge: {m}"))
            }
            other => other,
        })
    }
}

/// Ratio of two Gaussian densities acting on a subset of coordinates.
#[derive(Debug, Clone)]
pub struct GaussianRatio {
    coords: Vec<usize>,
    train: GaussianLaw,
    test: GaussianLaw,
}

impl GaussianRatio {
    pub fn new(coords: Vec<usize>, train: GaussianLaw, test: GaussianLaw) -> Result<Self> {
        if train.dim() != coords.len() || test.dim() != coords.len() {
            return Err(Error::DimensionMismatch(
                "Gaussian ratio coordinates vs law dimension".into(),
            ));
        }
        Ok(GaussianRatio {
            coords,
            train,
            test,
        })
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn train(&self) -> &GaussianLaw {
        &self.train
    }

    pub fn test(&self) -> &GaussianLaw {
        &self.test
    }

    /// `log f_te(x) − log f_tr(x)` for a full covariate vector.
    pub fn log_ratio(&self, x: &[f64]) -> f64 {
        let sub: Vec<f64> = self.coords.iter().map(|&j| x[j]).collect();
        self.test.log_kernel(&sub) - self.train.log_kernel(&sub)
    }
}

/// The density ratio `w(·) = f_te / f_tr`, known or estimated.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ImportanceModel {
    Known(KnownImportance),
    Gaussian(GaussianRatio),
    /// Raw importance values already evaluated at the training rows.
    Precomputed(Vec<f64>),
}

impl ImportanceModel {
    fn log_importance(&self, x: &[f64]) -> Result<f64> {
        let lw = match self {
            ImportanceModel::Known(f) => {
                let w = (f.0)(x);
                if !(w.is_finite() && w >= 0.0) {
                    return Err(Error::SupportViolation);
                }
                w.ln()
            }
            ImportanceModel::Gaussian(g) => g.log_ratio(x),
            ImportanceModel::Precomputed(_) => {
                return Err(Error::Invalid(
                    "precomputed importance values cannot be evaluated at new points".into(),
                ))
            }
        };
        if lw.is_nan() || lw == f64::INFINITY {
            return Err(Error::SupportViolation);
        }
        Ok(lw)
    }
}

/// `w(x) ≥ 0`, evaluated in log space for the Gaussian kind.
pub fn raw_importance(model: &ImportanceModel, x: &[f64]) -> Result<f64> {
    let w = model.log_importance(x)?.exp();
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::SupportViolation)
    }
}

/// Fits Gaussian laws to both samples on every column.
pub fn fit_gaussian_importance(
    x_train: &DMatrix<f64>,
    x_test_inputs: &DMatrix<f64>,
) -> Result<ImportanceModel> {
    let coords: Vec<usize> = (0..x_train.ncols()).collect();
    fit_gaussian_importance_on(x_train, x_test_inputs, &coords)
}

/// Fits Gaussian laws to both samples restricted to `coords`.
pub fn fit_gaussian_importance_on(
    x_train: &DMatrix<f64>,
    x_test_inputs: &DMatrix<f64>,
    coords: &[usize],
) -> Result<ImportanceModel> {
    if x_train.ncols() != x_test_inputs.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "training inputs have {} columns, test inputs {}",
            x_train.ncols(),
            x_test_inputs.ncols()
        )));
    }
    if coords.is_empty() || coords.iter().any(|&j| j >= x_train.ncols()) {
        return Err(Error::Invalid("importance coordinates out of range".into()));
    }
    let train = GaussianLaw::fit(x_train, coords)?;
    let test = GaussianLaw::fit(x_test_inputs, coords)?;
    Ok(ImportanceModel::Gaussian(GaussianRatio::new(
        coords.to_vec(),
        train,
        test,
    )?))
}

/// Trimmed values `v_t = min(w(x_t), b_n)` before normalization.
pub fn trimmed_importance(
    model: &ImportanceModel,
    x_train: &DMatrix<f64>,
    b_n: f64,
) -> Result<Vec<f64>> {
    if !(b_n > 0.0) {
        return Err(Error::Invalid(format!("trimming level must be positive, got {b_n}")));
    }
    let n = x_train.nrows();
    if let ImportanceModel::Precomputed(values) = model {
        if values.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} precomputed importance values for {n} rows",
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::SupportViolation);
        }
        return Ok(values.iter().map(|&v| v.min(b_n)).collect());
    }
    let log_b = b_n.ln();
    let mut row = vec![0.0; x_train.ncols()];
    (0..n)
        .map(|t| {
            for (j, r) in row.iter_mut().enumerate() {
                *r = x_train[(t, j)];
            }
            let lw = model.log_importance(&row)?;
            Ok(if lw >= log_b { b_n } else { lw.exp() })
        })
        .collect()
}

/// `w_t = v_t / ((1/n) Σ v_s)` with `v_t = min(w(x_t), b_n)`.
pub fn build_weights(
    model: &ImportanceModel,
    x_train: &DMatrix<f64>,
    b_n: f64,
) -> Result<WeightVector> {
    let v = trimmed_importance(model, x_train, b_n)?;
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroWeights);
    }
    WeightVector::normalize(v)
}
