//! Prediction error of a fitted model against a known population.
//!
//! The modified conditional prediction error (MCPE) measures the squared gap
//! to the test-domain best linear predictor; the conditional prediction
//! error (CPE) measures it against the regression function itself. Both are
//! conditional on the training sample, so the fit is treated as fixed.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::greedy::GreedyPath;
use crate::model::{predict, FitResult};
use crate::par::{dot, map_indexed, Execution};
use crate::rng::stream_rng;
use crate::weighting::{GaussianLaw, GaussianRatio, ImportanceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MisspecKind {
    /// `g(x) = x_0²`
    Quadratic,
    /// `g(x) = sin(x_0)`
    Sine,
}

/// Nonlinear term `amplitude · g(x_0)` added to the regression function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Misspecification {
    pub kind: MisspecKind,
    pub amplitude: f64,
}

impl Misspecification {
    pub fn value(&self, x0: f64) -> f64 {
        self.amplitude
            * match self.kind {
                MisspecKind::Quadratic => x0 * x0,
                MisspecKind::Sine => x0.sin(),
            }
    }

    /// `(E[g'(x_0)], E[g(x_0)])` for `x_0 ~ N(mean, var)`, scaled by the amplitude.
    fn gaussian_moments(&self, mean: f64, var: f64) -> (f64, f64) {
        let (slope, level) = match self.kind {
            MisspecKind::Quadratic => (2.0 * mean, var + mean * mean),
            MisspecKind::Sine => {
                let damp = (-0.5 * var).exp();
                (mean.cos() * damp, mean.sin() * damp)
            }
        };
        (self.amplitude * slope, self.amplitude * level)
    }
}

/// Input covariance, dense or AR(1) with a rank-one bump.
#[derive(Debug, Clone)]
pub enum Covariance {
    Dense {
        matrix: DMatrix<f64>,
        factor: DMatrix<f64>,
    },
    /// `ρ^{|i−j|} + extra · b_i b_j` with `b_i = ρ^{|i − anchor|}`.
    ///
    /// This is the law obtained from a stationary AR(1) chain by changing
    /// the variance of coordinate `anchor` to `1 + extra` while keeping the
    /// conditional law of the other coordinates given it.
    Ar1 {
        dim: usize,
        rho: f64,
        anchor: usize,
        extra: f64,
    },
}

impl Covariance {
    pub fn dense(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch("covariance must be square".into()));
        }
        ensure_finite(matrix.as_slice(), "covariance")?;
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let factor = sym
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("covariance".into()))?
            .l();
        Ok(Covariance::Dense {
            matrix: sym,
            factor,
        })
    }

    pub fn ar1(dim: usize, rho: f64, anchor: usize, extra: f64) -> Result<Self> {
        if !(rho.abs() < 1.0) {
            return Err(Error::Invalid(format!("AR(1) parameter must satisfy |rho| < 1, got {rho}")));
        }
        if anchor >= dim {
            return Err(Error::Invalid(format!("anchor {anchor} outside dimension {dim}")));
        }
        if !(1.0 + extra > 0.0) || !extra.is_finite() {
            return Err(Error::NotPositiveDefinite(format!(
                "anchor variance 1 + {extra} must be positive"
            )));
        }
        Ok(Covariance::Ar1 {
            dim,
            rho,
            anchor,
            extra,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Covariance::Dense { matrix, .. } => matrix.nrows(),
            Covariance::Ar1 { dim, .. } => *dim,
        }
    }

    fn anchor_profile(rho: f64, anchor: usize, dim: usize) -> Vec<f64> {
        (0..dim).map(|i| rho.powi(i.abs_diff(anchor) as i32)).collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            Covariance::Dense { matrix, .. } => matrix[(i, j)],
            Covariance::Ar1 {
                rho, anchor, extra, ..
            } => {
                rho.powi(i.abs_diff(j) as i32)
                    + extra
                        * rho.powi(i.abs_diff(*anchor) as i32)
                        * rho.powi(j.abs_diff(*anchor) as i32)
            }
        }
    }

    /// `Σ v` (`O(p)` for the AR(1) form).
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Covariance::Dense { matrix, .. } => (matrix * DVector::from_column_slice(v)).as_slice().to_vec(),
            Covariance::Ar1 {
                dim,
                rho,
                anchor,
                extra,
            } => {
                let p = *dim;
                let mut fwd = vec![0.0; p];
                let mut acc = 0.0;
                for i in 0..p {
                    acc = v[i] + rho * acc;
                    fwd[i] = acc;
                }
                let mut out = vec![0.0; p];
                acc = 0.0;
                for i in (0..p).rev() {
                    acc = v[i] + rho * acc;
                    out[i] = fwd[i] + acc - v[i];
                }
                if *extra != 0.0 {
                    let b = Self::anchor_profile(*rho, *anchor, p);
                    let s = extra * dot(&b, v);
                    for (o, bi) in out.iter_mut().zip(&b) {
                        *o += s * bi;
                    }
                }
                out
            }
        }
    }

    /// `vᵀ Σ v`.
    pub fn quad(&self, v: &[f64]) -> f64 {
        dot(v, &self.matvec(v))
    }

    pub fn submatrix(&self, idx: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.entry(idx[a], idx[b]))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let p = self.dim();
        DMatrix::from_fn(p, p, |i, j| self.entry(i, j))
    }

    /// Lower bound on the smallest eigenvalue (exact for the dense form).
    pub fn lambda_min_bound(&self) -> f64 {
        match self {
            Covariance::Dense { matrix, .. } => SymmetricEigen::new(matrix.clone()).eigenvalues.min(),
            Covariance::Ar1 { rho, extra, .. } => {
                (1.0 - rho.abs()) / (1.0 + rho.abs()) * (1.0 + extra).min(1.0)
            }
        }
    }

    /// Fills `out` with a draw from `N(0, Σ)`.
    pub fn sample_centered<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Covariance::Dense { factor, .. } => {
                let p = factor.nrows();
                let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (0..=i).map(|m| factor[(i, m)] * z[m]).sum();
                }
            }
            Covariance::Ar1 {
                dim,
                rho,
                anchor,
                extra,
            } => {
                let innov = (1.0 - rho * rho).sqrt();
                let a = *anchor;
                out[a] = (1.0 + extra).sqrt() * rng.sample::<f64, _>(StandardNormal);
                for j in a + 1..*dim {
                    out[j] = rho * out[j - 1] + innov * rng.sample::<f64, _>(StandardNormal);
                }
                for j in (0..a).rev() {
                    out[j] = rho * out[j + 1] + innov * rng.sample::<f64, _>(StandardNormal);
                }
            }
        }
    }
}

/// Spectral norm of `Σ_a − Σ_b`.
fn spectral_distance(a: &Covariance, b: &Covariance) -> f64 {
    if let (
        Covariance::Ar1 {
            dim,
            rho,
            anchor,
            extra,
        },
        Covariance::Ar1 {
            dim: d2,
            rho: r2,
            anchor: a2,
            extra: e2,
        },
    ) = (a, b)
    {
        if dim == d2 && rho == r2 && anchor == a2 {
            let bnorm2: f64 = Covariance::anchor_profile(*rho, *anchor, *dim).iter().map(|v| v * v).sum();
            return (extra - e2).abs() * bnorm2;
        }
    }
    let diff = a.to_dense() - b.to_dense();
    SymmetricEigen::new(diff)
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// A fully specified covariate-shift regression population.
#[derive(Debug, Clone)]
pub struct Population {
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub mu_tr: Vec<f64>,
    pub mu_te: Vec<f64>,
    pub cov_tr: Covariance,
    pub cov_te: Covariance,
    pub noise_sd: f64,
    pub misspec: Option<Misspecification>,
    /// Declared bound on the first- and second-moment shift, if any.
    pub c_diff: Option<f64>,
    /// Lower bound on `λ_min(Σ_te)`.
    pub lambda_floor: f64,
}

/// Best linear predictor of the test response restricted to a model.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub alpha: f64,
    pub beta: Vec<f64>,
    /// `E[ε_te(x | J)²]`.
    pub residual_variance: f64,
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub draws: usize,
}

const MC_CHUNK: usize = 4096;

#[derive(Clone, Copy)]
enum Target {
    TestLinear,
    Regression,
}

impl Population {
    pub fn new(
        alpha: f64,
        beta: Vec<f64>,
        (mu_tr, cov_tr): (Vec<f64>, Covariance),
        (mu_te, cov_te): (Vec<f64>, Covariance),
        noise_sd: f64,
    ) -> Result<Self> {
        let p = beta.len();
        if p == 0 || mu_tr.len() != p || mu_te.len() != p || cov_tr.dim() != p || cov_te.dim() != p {
            return Err(Error::DimensionMismatch("population parameters disagree on p".into()));
        }
        ensure_finite(&beta, "beta")?;
        ensure_finite(&mu_tr, "training mean")?;
        ensure_finite(&mu_te, "test mean")?;
        if !(noise_sd > 0.0 && noise_sd.is_finite() && alpha.is_finite()) {
            return Err(Error::Invalid("noise_sd must be positive and alpha finite".into()));
        }
        let lambda_floor = cov_te.lambda_min_bound();
        if !(lambda_floor > 0.0) {
            return Err(Error::NotPositiveDefinite("test covariance".into()));
        }
        Ok(Population {
            alpha,
            beta,
            mu_tr,
            mu_te,
            cov_tr,
            cov_te,
            noise_sd,
            misspec: None,
            c_diff: None,
            lambda_floor,
        })
    }

    pub fn with_misspec(mut self, misspec: Option<Misspecification>) -> Self {
        self.misspec = misspec.filter(|m| m.amplitude != 0.0);
        self
    }

    /// Declares a moderate-shift bound and checks it.
    pub fn with_c_diff(mut self, c_diff: f64) -> Result<Self> {
        let (dm, ds) = self.shift_norms();
        if dm > c_diff || ds > c_diff {
            return Err(Error::Invalid(format!(
                "shift (mean {dm:.4}, covariance {ds:.4}) exceeds declared C_diff {c_diff}"
            )));
        }
        self.c_diff = Some(c_diff);
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn correctly_specified(&self) -> bool {
        self.misspec.is_none()
    }

    /// `‖μ_te − μ_tr‖₂` and `‖Σ_te − Σ_tr‖₂`.
    pub fn shift_norms(&self) -> (f64, f64) {
        let dm = self
            .mu_te
            .iter()
            .zip(&self.mu_tr)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        (dm, spectral_distance(&self.cov_te, &self.cov_tr))
    }

    /// Regression function `y(x) = α + βᵀx (+ a g(x_0))`.
    pub fn regression(&self, x: &[f64]) -> f64 {
        let lin = self.alpha + dot(&self.beta, x);
        match &self.misspec {
            Some(m) => lin + m.value(x[0]),
            None => lin,
        }
    }

    /// Coefficients `(α_te, β_te)` of the test-domain best linear predictor.
    ///
    /// Exact for Gaussian inputs: by Stein's lemma the linear projection of
    /// `g(x_0)` has slope `E[g'(x_0)] e_0`.
    pub fn test_blp(&self) -> (f64, Vec<f64>) {
        let mut beta = self.beta.clone();
        let mut alpha = self.alpha;
        if let Some(m) = &self.misspec {
            let (slope, level) = m.gaussian_moments(self.mu_te[0], self.cov_te.entry(0, 0));
            beta[0] += slope;
            alpha += level - slope * self.mu_te[0];
        }
        (alpha, beta)
    }

    pub fn mean(&self, domain: Domain) -> &[f64] {
        match domain {
            Domain::Train => &self.mu_tr,
            Domain::Test => &self.mu_te,
        }
    }

    pub fn covariance(&self, domain: Domain) -> &Covariance {
        match domain {
            Domain::Train => &self.cov_tr,
            Domain::Test => &self.cov_te,
        }
    }

    pub fn sample_input<R: Rng + ?Sized>(&self, domain: Domain, rng: &mut R, out: &mut [f64]) {
        self.covariance(domain).sample_centered(rng, out);
        for (o, m) in out.iter_mut().zip(self.mean(domain)) {
            *o += m;
        }
    }

    /// The exact density ratio `f_te / f_tr` of the input laws.
    pub fn importance_model(&self) -> Result<ImportanceModel> {
        if let (
            Covariance::Ar1 {
                dim,
                rho,
                anchor,
                extra: e_tr,
            },
            Covariance::Ar1 {
                dim: d2,
                rho: r2,
                anchor: a2,
                extra: e_te,
            },
        ) = (&self.cov_tr, &self.cov_te)
        {
            let b = Covariance::anchor_profile(*rho, *anchor, *dim);
            let along_b = |mu: &[f64]| {
                let m = mu[*anchor];
                mu.iter().zip(&b).all(|(v, bi)| (v - m * bi).abs() <= 1e-12 * (1.0 + v.abs()))
            };
            if dim == d2 && rho == r2 && anchor == a2 && along_b(&self.mu_tr) && along_b(&self.mu_te) {
                // only the anchor's marginal differs between domains
                let law = |m: f64, e: f64| {
                    GaussianLaw::new(DVector::from_element(1, m), DMatrix::from_element(1, 1, 1.0 + e))
                };
                return Ok(ImportanceModel::Gaussian(GaussianRatio::new(
                    vec![*anchor],
                    law(self.mu_tr[*anchor], *e_tr)?,
                    law(self.mu_te[*anchor], *e_te)?,
                )?));
            }
        }
        let coords: Vec<usize> = (0..self.p()).collect();
        let train = GaussianLaw::new(DVector::from_column_slice(&self.mu_tr), self.cov_tr.to_dense())?;
        let test = GaussianLaw::new(DVector::from_column_slice(&self.mu_te), self.cov_te.to_dense())?;
        Ok(ImportanceModel::Gaussian(GaussianRatio::new(coords, train, test)?))
    }

    fn check_fit(&self, fit: &FitResult) -> Result<()> {
        if fit.beta.len() != fit.model.len() || fit.model.iter().any(|&j| j >= self.p()) {
            return Err(Error::DimensionMismatch("fit does not match population dimension".into()));
        }
        Ok(())
    }
}

fn quadratic_error(pop: &Population, fit: &FitResult, alpha: f64, beta: &[f64]) -> f64 {
    let mut delta = beta.to_vec();
    for (&j, &b) in fit.model.iter().zip(&fit.beta) {
        delta[j] -= b;
    }
    let level = alpha - fit.alpha + dot(&delta, &pop.mu_te);
    pop.cov_te.quad(&delta) + level * level
}

/// `E[(y_te(x) − ŷ(x))²]` over `x ~ f_te`, with `y_te` the test-domain best
/// linear predictor.
pub fn mcpe_analytic(pop: &Population, fit: &FitResult) -> Result<f64> {
    pop.check_fit(fit)?;
    let (alpha, beta) = pop.test_blp();
    Ok(quadratic_error(pop, fit, alpha, &beta))
}

/// `E[(y(x) − ŷ(x))²]` over `x ~ f_te`; requires a correctly specified population.
pub fn cpe_analytic(pop: &Population, fit: &FitResult) -> Result<f64> {
    pop.check_fit(fit)?;
    if !pop.correctly_specified() {
        return Err(Error::Invalid(
            "analytic CPE needs a linear regression function; use cpe_monte_carlo".into(),
        ));
    }
    Ok(quadratic_error(pop, fit, pop.alpha, &pop.beta))
}

/// Test-domain best linear predictor on `J` and its residual variance.
pub fn population_projection(pop: &Population, model: &[usize]) -> Result<Projection> {
    crate::model::fit::check_model(model, pop.p())?;
    let (alpha_te, beta_te) = pop.test_blp();
    let sub = pop.cov_te.submatrix(model);
    let chol = sub.cholesky().ok_or_else(|| Error::SingularModel {
        model: model.to_vec(),
    })?;
    let full = pop.cov_te.matvec(&beta_te);
    let rhs = DVector::from_iterator(model.len(), model.iter().map(|&j| full[j]));
    let beta_j = chol.solve(&rhs);
    let alpha = alpha_te + dot(&beta_te, &pop.mu_te)
        - model.iter().zip(beta_j.iter()).map(|(&j, b)| b * pop.mu_te[j]).sum::<f64>();
    let mut delta = beta_te;
    for (&j, b) in model.iter().zip(beta_j.iter()) {
        delta[j] -= b;
    }
    Ok(Projection {
        alpha,
        beta: beta_j.as_slice().to_vec(),
        residual_variance: pop.cov_te.quad(&delta),
    })
}

/// Population quantities at one step of a greedy path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub k: usize,
    /// `E[ε_te(x | Ĵ_k)²]`.
    pub residual_variance: f64,
    pub mcpe: f64,
}

/// Residual variance and MCPE at every step of `path`.
pub fn path_profile(pop: &Population, path: &GreedyPath) -> Result<Vec<ProfilePoint>> {
    (1..=path.len())
        .map(|k| {
            Ok(ProfilePoint {
                k,
                residual_variance: population_projection(pop, path.model(k))?.residual_variance,
                mcpe: mcpe_analytic(pop, path.fit(k))?,
            })
        })
        .collect()
}

#[derive(Clone, Copy)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        let count = self.count + o.count;
        let delta = o.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * o.count / count,
            m2: self.m2 + o.m2 + delta * delta * self.count * o.count / count,
        }
    }
}

fn monte_carlo(
    pop: &Population,
    fit: &FitResult,
    n_draws: usize,
    seed: u64,
    target: Target,
    exec: Execution,
) -> Result<McEstimate> {
    pop.check_fit(fit)?;
    if n_draws < 100 {
        return Err(Error::Invalid(format!("need at least 100 draws, got {n_draws}")));
    }
    let (alpha_te, beta_te) = pop.test_blp();
    let chunks = n_draws.div_ceil(MC_CHUNK);
    let parts = map_indexed(exec, chunks, |c| {
        let size = MC_CHUNK.min(n_draws - c * MC_CHUNK);
        let mut rng = stream_rng(seed, c as u64);
        let mut x = vec![0.0; pop.p()];
        let mut acc = Moments {
            count: 0.0,
            mean: 0.0,
            m2: 0.0,
        };
        for _ in 0..size {
            pop.sample_input(Domain::Test, &mut rng, &mut x);
            let truth = match target {
                Target::TestLinear => alpha_te + dot(&beta_te, &x),
                Target::Regression => pop.regression(&x),
            };
            let e = truth - predict(fit, &x);
            let sq = e * e;
            acc.count += 1.0;
            let d = sq - acc.mean;
            acc.mean += d / acc.count;
            acc.m2 += d * (sq - acc.mean);
        }
        acc
    });
    let total = parts.into_iter().reduce(Moments::merge).expect("at least one chunk");
    let var = total.m2 / (total.count - 1.0);
    Ok(McEstimate {
        estimate: total.mean,
        std_error: (var / total.count).sqrt(),
        draws: n_draws,
    })
}

/// Monte Carlo MCPE over fresh test inputs; the result depends only on `seed`.
pub fn mcpe_monte_carlo(pop: &Population, fit: &FitResult, n_draws: usize, seed: u64) -> Result<McEstimate> {
    monte_carlo(pop, fit, n_draws, seed, Target::TestLinear, Execution::default())
}

/// [`mcpe_monte_carlo`] with an explicit execution mode.
pub fn mcpe_monte_carlo_with(
    pop: &Population,
    fit: &FitResult,
    n_draws: usize,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    monte_carlo(pop, fit, n_draws, seed, Target::TestLinear, exec)
}

/// Monte Carlo CPE against the (possibly nonlinear) regression function.
pub fn cpe_monte_carlo(pop: &Population, fit: &FitResult, n_draws: usize, seed: u64) -> Result<McEstimate> {
    monte_carlo(pop, fit, n_draws, seed, Target::Regression, Execution::default())
}
