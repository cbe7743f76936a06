//! Reference implementations used as test oracles. Dense and slow on
//! purpose; none of them share code with the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use greedyshift::evaluation::{Covariance, Population};
use greedyshift::model::{Dataset, FitResult, WeightVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Random correlated design with a sparse-ish response and positive weights.
pub fn random_instance(seed: u64, n: usize, p: usize) -> (Dataset, WeightVector) {
    let mut r = rng(seed);
    let mix: f64 = r.random_range(0.0..0.6);
    let mut x = DMatrix::zeros(n, p);
    for t in 0..n {
        let common = normal(&mut r);
        for j in 0..p {
            x[(t, j)] = mix * common + normal(&mut r) + 0.3 * j as f64;
        }
    }
    let coefs: Vec<f64> = (0..p).map(|j| if j % 3 == 0 { 1.0 / (j + 1) as f64 } else { 0.0 }).collect();
    let y: Vec<f64> = (0..n)
        .map(|t| 0.5 + (0..p).map(|j| coefs[j] * x[(t, j)]).sum::<f64>() + 0.3 * normal(&mut r))
        .collect();
    let raw: Vec<f64> = (0..n).map(|_| r.random_range(0.1..3.0)).collect();
    (Dataset::new(x, y).unwrap(), WeightVector::normalize(raw).unwrap())
}

/// Brute-force weighted mean, covariance and cross-moment (1/n).
pub fn brute_moments(data: &Dataset, w: &[f64]) -> (Vec<f64>, f64, DMatrix<f64>, Vec<f64>) {
    let (n, p) = (data.n(), data.p());
    let nf = n as f64;
    let x = data.x();
    let y = data.y();
    let mut mu = vec![0.0; p];
    for j in 0..p {
        for t in 0..n {
            mu[j] += w[t] * x[(t, j)] / nf;
        }
    }
    let mut mu_y = 0.0;
    for t in 0..n {
        mu_y += w[t] * y[t] / nf;
    }
    let mut gram = DMatrix::zeros(p, p);
    let mut cross = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            for t in 0..n {
                gram[(i, j)] += w[t] * (x[(t, i)] - mu[i]) * (x[(t, j)] - mu[j]) / nf;
            }
        }
        for t in 0..n {
            cross[i] += w[t] * (x[(t, i)] - mu[i]) * (y[t] - mu_y) / nf;
        }
    }
    (mu, mu_y, gram, cross)
}

/// `W^{1/2} [1, X_J]`.
fn weighted_design(data: &Dataset, w: &[f64], model: &[usize]) -> DMatrix<f64> {
    let n = data.n();
    DMatrix::from_fn(n, model.len() + 1, |t, c| {
        let v = if c == 0 { 1.0 } else { data.x()[(t, model[c - 1])] };
        w[t].sqrt() * v
    })
}

/// Weighted least squares with intercept through an SVD solve of the
/// weighted design. Returns `(alpha, beta)`.
pub fn wls_reference(data: &Dataset, w: &[f64], model: &[usize]) -> (f64, Vec<f64>) {
    let a = weighted_design(data, w, model);
    let b = DVector::from_iterator(data.n(), (0..data.n()).map(|t| w[t].sqrt() * data.y()[t]));
    let coef = a.svd(true, true).solve(&b, 1e-14).unwrap();
    (coef[0], coef.as_slice()[1..].to_vec())
}

fn projector(m: &DMatrix<f64>) -> DMatrix<f64> {
    let pinv = (m.transpose() * m).pseudo_inverse(1e-12).unwrap();
    m * pinv * m.transpose()
}

/// `(1/n) yᵀ W^{1/2} (I − P_W − P(J)) W^{1/2} y` with the projectors built
/// as explicit `n × n` matrices.
pub fn projection_sigma2(data: &Dataset, w: &[f64], model: &[usize]) -> f64 {
    let n = data.n();
    let sw = DMatrix::from_fn(n, 1, |t, _| w[t].sqrt());
    let p_w = projector(&sw);
    let perp = DMatrix::identity(n, n) - &p_w;
    let cols = DMatrix::from_fn(n, model.len(), |t, c| w[t].sqrt() * data.x()[(t, model[c])]);
    let p_j = projector(&(&perp * cols));
    let wy = DVector::from_iterator(n, (0..n).map(|t| w[t].sqrt() * data.y()[t]));
    let m = DMatrix::identity(n, n) - p_w - p_j;
    (wy.transpose() * m * &wy)[(0, 0)] / n as f64
}

/// Plain greedy selection written from the definition: score every
/// remaining column against the residual of a fresh least-squares refit.
pub struct ReferencePath {
    pub order: Vec<usize>,
    pub alphas: Vec<f64>,
    pub betas: Vec<Vec<f64>>,
    pub sigma2: Vec<f64>,
}

pub fn reference_path(data: &Dataset, w: &[f64], k: usize) -> ReferencePath {
    let (n, p) = (data.n(), data.p());
    let nf = n as f64;
    let x = data.x();
    let mu: Vec<f64> = (0..p).map(|j| (0..n).map(|t| w[t] * x[(t, j)]).sum::<f64>() / nf).collect();
    let mu_y = (0..n).map(|t| w[t] * data.y()[t]).sum::<f64>() / nf;
    let mut resid: Vec<f64> = data.y().iter().map(|y| y - mu_y).collect();
    let mut out = ReferencePath {
        order: vec![],
        alphas: vec![],
        betas: vec![],
        sigma2: vec![],
    };
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..p).filter(|j| !out.order.contains(j)) {
            let var: f64 = (0..n).map(|t| w[t] * (x[(t, j)] - mu[j]).powi(2)).sum::<f64>() / nf;
            let cov: f64 = (0..n).map(|t| w[t] * (x[(t, j)] - mu[j]) * resid[t]).sum::<f64>() / nf;
            let score = cov.abs() / var.sqrt();
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((j, score));
            }
        }
        let (j, _) = best.unwrap();
        out.order.push(j);
        let (alpha, beta) = wls_reference(data, w, &out.order);
        for t in 0..n {
            let fit = alpha + out.order.iter().zip(&beta).map(|(&i, b)| b * x[(t, i)]).sum::<f64>();
            resid[t] = data.y()[t] - fit;
        }
        out.sigma2.push((0..n).map(|t| w[t] * resid[t] * resid[t]).sum::<f64>() / nf);
        out.alphas.push(alpha);
        out.betas.push(beta);
    }
    out
}

/// Multivariate normal density from the textbook formula.
pub fn gaussian_density(x: &[f64], mean: &[f64], cov: &DMatrix<f64>) -> f64 {
    let k = x.len();
    let d = DVector::from_iterator(k, x.iter().zip(mean).map(|(a, b)| a - b));
    let inv = cov.clone().try_inverse().unwrap();
    let q = (d.transpose() * inv * &d)[(0, 0)];
    (-0.5 * q).exp() / ((2.0 * std::f64::consts::PI).powi(k as i32) * cov.determinant()).sqrt()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() <= tol * 1e-3
}

pub fn random_spd(r: &mut ChaCha8Rng, p: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(p, p, |_, _| normal(r) * 0.5);
    &a * a.transpose() + DMatrix::identity(p, p) * 0.5
}

/// Dense Gaussian population with random means, covariances and coefficients.
pub fn random_population(seed: u64, p: usize) -> Population {
    let mut r = rng(seed);
    let beta: Vec<f64> = (0..p).map(|_| normal(&mut r)).collect();
    let mu_te: Vec<f64> = (0..p).map(|_| 0.5 * normal(&mut r)).collect();
    let cov_tr = random_spd(&mut r, p);
    let cov_te = random_spd(&mut r, p);
    Population::new(
        normal(&mut r),
        beta,
        (vec![0.0; p], Covariance::dense(cov_tr).unwrap()),
        (mu_te, Covariance::dense(cov_te).unwrap()),
        1.0,
    )
    .unwrap()
}

pub fn random_fit(r: &mut ChaCha8Rng, p: usize) -> FitResult {
    let mut model: Vec<usize> = (0..p).filter(|_| r.random_bool(0.5)).collect();
    if model.is_empty() {
        model.push(r.random_range(0..p));
    }
    FitResult {
        beta: model.iter().map(|_| normal(r)).collect(),
        model,
        alpha: normal(r),
        sigma2: None,
        weighted: true,
    }
}
