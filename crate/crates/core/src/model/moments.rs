use nalgebra::DMatrix;

use super::data::{Dataset, WeightVector};
use crate::error::{Error, Result};
use crate::par::{dot, for_each_chunk_mut, map_indexed, Execution};

/// Read access to the centered weighted Gram system `(Σ̂, ŝ, μ̂, μ̂_y)`.
pub trait GramSource {
    fn dim(&self) -> usize;
    fn mu_y(&self) -> f64;
    fn mu_x(&self, j: usize) -> f64;
    fn gram(&self, i: usize, j: usize) -> f64;
    fn cross(&self, j: usize) -> f64;
    fn weighted(&self) -> bool;
}

/// Weighted means, centered weighted Gram matrix and cross-moment vector.
#[derive(Debug, Clone)]
pub struct WeightedMoments {
    pub mu_y: f64,
    pub mu_x: Vec<f64>,
    pub gram: DMatrix<f64>,
    pub cross: Vec<f64>,
    pub weighted: bool,
}

impl GramSource for WeightedMoments {
    fn dim(&self) -> usize {
        self.mu_x.len()
    }
    fn mu_y(&self) -> f64 {
        self.mu_y
    }
    fn mu_x(&self, j: usize) -> f64 {
        self.mu_x[j]
    }
    fn gram(&self, i: usize, j: usize) -> f64 {
        self.gram[(i, j)]
    }
    fn cross(&self, j: usize) -> f64 {
        self.cross[j]
    }
    fn weighted(&self) -> bool {
        self.weighted
    }
}

/// Columns of `P_W^⊥ W^{1/2} X` and `P_W^⊥ W^{1/2} y`.
///
/// Entry `t` of projected column `j` is `sqrt(w_t) (x_tj - μ̂_j)`, so Gram
/// entries are plain inner products divided by `n`. Entries are computed on
/// demand, which keeps a greedy path at `O(n p)` per step instead of
/// materializing the `p × p` matrix.
#[derive(Debug, Clone)]
pub struct WeightedDesign {
    n: usize,
    p: usize,
    z: Vec<f64>,
    zy: Vec<f64>,
    sqrt_w: Vec<f64>,
    mu_x: Vec<f64>,
    mu_y: f64,
    col_var: Vec<f64>,
    weighted: bool,
}

impl WeightedDesign {
    pub fn new(data: &Dataset, w: &WeightVector) -> Result<Self> {
        Self::with_execution(data, w, Execution::default())
    }

    pub fn with_execution(data: &Dataset, w: &WeightVector, exec: Execution) -> Result<Self> {
        let (n, p) = (data.n(), data.p());
        if w.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {n} observations",
                w.len()
            )));
        }
        let wv = w.as_slice();
        let nf = n as f64;
        let sqrt_w: Vec<f64> = wv.iter().map(|v| v.sqrt()).collect();
        let mu_y = dot(wv, data.y()) / nf;
        let zy: Vec<f64> = data
            .y()
            .iter()
            .zip(&sqrt_w)
            .map(|(y, s)| s * (y - mu_y))
            .collect();

        let mut z = vec![0.0; n * p];
        for_each_chunk_mut(exec, &mut z, n, |j, col| {
            let x = data.column(j);
            let mu = dot(wv, x) / nf;
            for ((zt, xt), st) in col.iter_mut().zip(x).zip(&sqrt_w) {
                *zt = st * (xt - mu);
            }
        });
        let mu_x = map_indexed(exec, p, |j| dot(wv, data.column(j)) / nf);
        let col_var = map_indexed(exec, p, |j| {
            let c = &z[j * n..(j + 1) * n];
            dot(c, c) / nf
        });
        Ok(WeightedDesign {
            n,
            p,
            z,
            zy,
            sqrt_w,
            mu_x,
            mu_y,
            col_var,
            weighted: !w.is_uniform(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Projected column `j`, `sqrt(w) ∘ (x_j - μ̂_j)`.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.z[j * self.n..(j + 1) * self.n]
    }

    /// Projected response `sqrt(w) ∘ (y - μ̂_y)`.
    pub fn response(&self) -> &[f64] {
        &self.zy
    }

    pub fn sqrt_weights(&self) -> &[f64] {
        &self.sqrt_w
    }

    /// Weighted variances `Σ̂_jj`.
    pub fn column_variances(&self) -> &[f64] {
        &self.col_var
    }

    pub fn means(&self) -> &[f64] {
        &self.mu_x
    }

    /// Materializes the full moment set (`O(n p²)`).
    pub fn to_moments(&self, exec: Execution) -> WeightedMoments {
        let p = self.p;
        let upper = map_indexed(exec, p, |i| {
            (i..p).map(|j| self.gram(i, j)).collect::<Vec<f64>>()
        });
        let mut gram = DMatrix::zeros(p, p);
        for (i, row) in upper.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                gram[(i, i + k)] = v;
                gram[(i + k, i)] = v;
            }
        }
        WeightedMoments {
            mu_y: self.mu_y,
            mu_x: self.mu_x.clone(),
            gram,
            cross: (0..p).map(|j| self.cross(j)).collect(),
            weighted: self.weighted,
        }
    }
}

impl GramSource for WeightedDesign {
    fn dim(&self) -> usize {
        self.p
    }
    fn mu_y(&self) -> f64 {
        self.mu_y
    }
    fn mu_x(&self, j: usize) -> f64 {
        self.mu_x[j]
    }
    fn gram(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.col_var[i]
        } else {
            dot(self.column(i), self.column(j)) / self.n as f64
        }
    }
    fn cross(&self, j: usize) -> f64 {
        dot(self.column(j), &self.zy) / self.n as f64
    }
    fn weighted(&self) -> bool {
        self.weighted
    }
}

/// Weighted moments `μ̂_y`, `μ̂`, `Σ̂` and `ŝ` via the projection form.
pub fn weighted_moments(data: &Dataset, w: &WeightVector) -> Result<WeightedMoments> {
    let exec = Execution::default();
    Ok(WeightedDesign::with_execution(data, w, exec)?.to_moments(exec))
}
