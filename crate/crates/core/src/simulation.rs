//! Synthetic covariate-shift regression problems with Gaussian inputs.
//!
//! Training inputs follow a stationary AR(1) law. The test law changes the
//! marginal of one anchor coordinate (mean and variance) and keeps the
//! conditional law of the others given it, so the true density ratio
//! depends on that coordinate alone.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{Covariance, Domain, MisspecKind, Misspecification, Population};
use crate::model::Dataset;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Known,
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    pub p: usize,
    /// Sparsity exponent: `β_j ∝ j^{−(ξ+1)}`.
    #[serde(default = "default_xi")]
    pub xi: f64,
    /// Mean of the anchor coordinate under the test law.
    #[serde(default = "default_shift_mean")]
    pub shift_mean: f64,
    /// Extra variance of the anchor coordinate under the test law.
    #[serde(default = "default_shift_cov")]
    pub shift_cov: f64,
    /// Index of the anchor coordinate (0-based).
    #[serde(default)]
    pub shift_coord: usize,
    #[serde(default = "default_one")]
    pub noise_sd: f64,
    #[serde(default)]
    pub misspec_amplitude: f64,
    #[serde(default = "default_misspec_kind")]
    pub misspec_kind: MisspecKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_weight_mode")]
    pub weight_mode: WeightMode,
    #[serde(default = "default_q_declared")]
    pub q_declared: f64,
    /// `‖β‖₂`.
    #[serde(default = "default_beta_norm")]
    pub beta_norm: f64,
    #[serde(default = "default_one")]
    pub alpha: f64,
    /// AR(1) correlation of the training inputs.
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Size of the unlabeled test-input sample; defaults to `n`.
    #[serde(default)]
    pub n_test: Option<usize>,
    /// Declared moderate-shift bound, checked when present.
    #[serde(default)]
    pub c_diff: Option<f64>,
}

fn default_xi() -> f64 {
    1.0
}
fn default_shift_mean() -> f64 {
    0.5
}
fn default_shift_cov() -> f64 {
    0.25
}
fn default_one() -> f64 {
    1.0
}
fn default_misspec_kind() -> MisspecKind {
    MisspecKind::Quadratic
}
fn default_weight_mode() -> WeightMode {
    WeightMode::Known
}
fn default_q_declared() -> f64 {
    2.0
}
fn default_beta_norm() -> f64 {
    5.0
}
fn default_rho() -> f64 {
    0.3
}

impl ScenarioConfig {
    /// Defaults for every field except the sizes.
    pub fn new(n: usize, p: usize) -> Self {
        ScenarioConfig {
            n,
            p,
            xi: default_xi(),
            shift_mean: default_shift_mean(),
            shift_cov: default_shift_cov(),
            shift_coord: 0,
            noise_sd: 1.0,
            misspec_amplitude: 0.0,
            misspec_kind: default_misspec_kind(),
            seed: 0,
            weight_mode: default_weight_mode(),
            q_declared: default_q_declared(),
            beta_norm: default_beta_norm(),
            alpha: 1.0,
            rho: default_rho(),
            n_test: None,
            c_diff: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n < 10 {
            return bad(format!("scenario n must be at least 10, got {}", self.n));
        }
        if self.p < 2 {
            return bad(format!("scenario p must be at least 2, got {}", self.p));
        }
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return bad(format!("xi must be non-negative, got {}", self.xi));
        }
        if !(self.noise_sd > 0.0 && self.noise_sd.is_finite()) {
            return bad(format!("noise_sd must be positive, got {}", self.noise_sd));
        }
        if self.shift_coord >= self.p {
            return bad(format!("shift_coord {} outside 0..{}", self.shift_coord, self.p));
        }
        if !(self.q_declared > 0.0) {
            return bad(format!("q_declared must be positive, got {}", self.q_declared));
        }
        if !(self.beta_norm >= 0.0 && self.beta_norm.is_finite()) {
            return bad(format!("beta_norm must be non-negative, got {}", self.beta_norm));
        }
        if self.n_test == Some(0) {
            return bad("n_test must be positive".into());
        }
        for (name, v) in [
            ("shift_mean", self.shift_mean),
            ("shift_cov", self.shift_cov),
            ("misspec_amplitude", self.misspec_amplitude),
            ("alpha", self.alpha),
            ("rho", self.rho),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        Ok(())
    }

    pub fn n_test(&self) -> usize {
        self.n_test.unwrap_or(self.n)
    }
}

/// `β_j = c₀ j^{−(ξ+1)}`, `j = 1..p`, scaled to `‖β‖₂ = norm`.
pub fn polynomial_coefficients(p: usize, xi: f64, norm: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=p).map(|j| (j as f64).powf(-(xi + 1.0))).collect();
    let len = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    raw.into_iter().map(|v| v * norm / len).collect()
}

/// `‖β_J‖₁ / ‖β_J‖₂^{2ξ/(2ξ+1)}`; the sparsity constant is its supremum over `J`.
pub fn sparsity_ratio(beta: &[f64], subset: &[usize], xi: f64) -> f64 {
    let l1: f64 = subset.iter().map(|&j| beta[j].abs()).sum();
    let l2 = subset.iter().map(|&j| beta[j] * beta[j]).sum::<f64>().sqrt();
    if l2 == 0.0 {
        return 0.0;
    }
    l1 / l2.powf(2.0 * xi / (2.0 * xi + 1.0))
}

pub fn make_population(cfg: &ScenarioConfig) -> Result<Population> {
    cfg.validate()?;
    let p = cfg.p;
    let a = cfg.shift_coord;
    let cov_tr = Covariance::ar1(p, cfg.rho, a, 0.0)?;
    let cov_te = Covariance::ar1(p, cfg.rho, a, cfg.shift_cov)?;
    let mu_te: Vec<f64> = (0..p).map(|i| cfg.shift_mean * cfg.rho.powi(i.abs_diff(a) as i32)).collect();
    let pop = Population::new(
        cfg.alpha,
        polynomial_coefficients(p, cfg.xi, cfg.beta_norm),
        (vec![0.0; p], cov_tr),
        (mu_te, cov_te),
        cfg.noise_sd,
    )?
    .with_misspec(Some(Misspecification {
        kind: cfg.misspec_kind,
        amplitude: cfg.misspec_amplitude,
    }));
    match cfg.c_diff {
        Some(c) => pop.with_c_diff(c),
        None => Ok(pop),
    }
}

/// A labeled training sample plus unlabeled test-domain inputs.
#[derive(Debug, Clone)]
pub struct Draw {
    pub train: Dataset,
    pub test_inputs: DMatrix<f64>,
}

fn sample_inputs(pop: &Population, domain: Domain, rows: usize, seed: u64, stream: u64) -> DMatrix<f64> {
    let mut rng = stream_rng(seed, stream);
    let p = pop.p();
    let mut x = DMatrix::zeros(rows, p);
    let mut row = vec![0.0; p];
    for t in 0..rows {
        pop.sample_input(domain, &mut rng, &mut row);
        for (j, v) in row.iter().enumerate() {
            x[(t, j)] = *v;
        }
    }
    x
}

/// Draws `n` training rows and `n` test inputs.
pub fn draw_dataset(pop: &Population, n: usize, seed: u64) -> Result<Draw> {
    draw_dataset_with(pop, n, n, seed)
}

pub fn draw_dataset_with(pop: &Population, n: usize, n_test: usize, seed: u64) -> Result<Draw> {
    if n < 2 {
        return Err(Error::Invalid(format!("need at least 2 training rows, got {n}")));
    }
    let x = sample_inputs(pop, Domain::Train, n, seed, 0);
    let mut noise = stream_rng(seed, 1);
    let mut row = vec![0.0; pop.p()];
    let y: Vec<f64> = (0..n)
        .map(|t| {
            for (j, r) in row.iter_mut().enumerate() {
                *r = x[(t, j)];
            }
            pop.regression(&row) + pop.noise_sd * noise.sample::<f64, _>(StandardNormal)
        })
        .collect();
    Ok(Draw {
        train: Dataset::new(x, y)?,
        test_inputs: sample_inputs(pop, Domain::Test, n_test, seed, 2),
    })
}
