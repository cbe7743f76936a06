use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Training covariates and responses.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: Vec<f64>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: Vec<f64>) -> Result<Self> {
        let (n, p) = x.shape();
        if n < 2 || p < 1 {
            return Err(Error::Invalid(format!(
                "dataset needs n >= 2 and p >= 1, got n={n}, p={p}"
            )));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "x has {n} rows but y has length {}",
                y.len()
            )));
        }
        ensure_finite(x.as_slice(), "covariate matrix")?;
        ensure_finite(&y, "response vector")?;
        Ok(Dataset {
            x,
            y,
            feature_names: None,
        })
    }

    /// Builds a dataset from row-major covariate rows.
    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::DimensionMismatch("ragged covariate rows".into()));
        }
        Self::new(DMatrix::from_fn(n, p, |t, j| rows[t][j]), y)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature names for {} columns",
                names.len(),
                self.p()
            )));
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Contiguous view of column `j`.
    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.x.as_slice()[j * n..(j + 1) * n]
    }

    pub fn row(&self, t: usize) -> Vec<f64> {
        self.x.row(t).iter().copied().collect()
    }

    /// Same data with columns reordered: new column `k` is old column `order[k]`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.p() {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let x = DMatrix::from_fn(self.n(), self.p(), |t, k| self.x[(t, order[k])]);
        Dataset::new(x, self.y.clone())
    }
}

/// Trimmed, normalized per-observation weights with `(1/n) Σ w_t = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    const MEAN_TOL: f64 = 1e-12;

    pub fn uniform(n: usize) -> Self {
        WeightVector(vec![1.0; n])
    }

    /// Divides non-negative raw values by their mean.
    pub fn normalize(raw: Vec<f64>) -> Result<Self> {
        ensure_finite(&raw, "weights")?;
        if raw.is_empty() {
            return Err(Error::Invalid("empty weight vector".into()));
        }
        if raw.iter().any(|&v| v < 0.0) {
            return Err(Error::Invalid("negative weight".into()));
        }
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        if mean <= 0.0 {
            return Err(Error::ZeroWeights);
        }
        Ok(WeightVector(raw.into_iter().map(|v| v / mean).collect()))
    }

    /// Accepts values that already average to one.
    pub fn from_normalized(values: Vec<f64>) -> Result<Self> {
        ensure_finite(&values, "weights")?;
        if values.is_empty() || values.iter().any(|&v| v < 0.0) {
            return Err(Error::Invalid("weights must be non-empty and non-negative".into()));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if (mean - 1.0).abs() > Self::MEAN_TOL {
            return Err(Error::Invalid(format!("weights average to {mean}, not 1")));
        }
        Ok(WeightVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every weight is exactly one (plain OGA).
    pub fn is_uniform(&self) -> bool {
        self.0.iter().all(|&w| w == 1.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}
