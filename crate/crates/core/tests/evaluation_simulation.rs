mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use greedyshift::evaluation::*;
use greedyshift::greedy::build_path;
use greedyshift::model::{wls_fit, weighted_moments, WeightVector};
use greedyshift::simulation::*;
use greedyshift::weighting::{build_weights, compute_bn, raw_importance, ScheduleConfig};

#[test]
fn analytic_mcpe_matches_monte_carlo() {
    let pop = random_population(4, 4);
    let mut r = rng(40);
    for i in 0..3 {
        let fit = random_fit(&mut r, 4);
        let exact = mcpe_analytic(&pop, &fit).unwrap();
        let mc = mcpe_monte_carlo(&pop, &fit, 1_000_000, 500 + i).unwrap();
        assert!((exact - mc.estimate).abs() < 3.0 * mc.std_error, "{exact} vs {mc:?}");
        let cpe = cpe_analytic(&pop, &fit).unwrap();
        assert_eq!(cpe, exact);
        let mc = cpe_monte_carlo(&pop, &fit, 1_000_000, 900 + i).unwrap();
        assert!((cpe - mc.estimate).abs() < 3.0 * mc.std_error);
    }
}

#[test]
fn decomposition_identity_on_random_instances() {
    for seed in 0..30 {
        let p = 2 + (seed as usize % 7);
        let pop = random_population(seed, p);
        let mut r = rng(seed + 1000);
        let fit = random_fit(&mut r, p);
        let proj = population_projection(&pop, &fit.model).unwrap();
        let sub = pop.cov_te.submatrix(&fit.model);
        let d = DVector::from_iterator(fit.model.len(), fit.beta.iter().zip(&proj.beta).map(|(a, b)| a - b));
        let mu_j = DVector::from_iterator(fit.model.len(), fit.model.iter().map(|&j| pop.mu_te[j]));
        let level = fit.alpha - proj.alpha + d.dot(&mu_j);
        let estimation = level * level + (d.transpose() * &sub * &d)[(0, 0)];
        let total = mcpe_analytic(&pop, &fit).unwrap();
        assert!(rel_close(total, proj.residual_variance + estimation, 1e-8));
        assert!(total >= 0.0);
    }
}

#[test]
fn projection_is_monotone_under_inclusion() {
    for seed in 0..20 {
        let p = 8;
        let pop = random_population(seed, p);
        let mut r = rng(seed + 77);
        let mut model = vec![r.random_range(0..p)];
        let mut last = population_projection(&pop, &model).unwrap().residual_variance;
        while model.len() < p {
            let j = loop {
                let j = r.random_range(0..p);
                if !model.contains(&j) {
                    break j;
                }
            };
            model.push(j);
            let now = population_projection(&pop, &model).unwrap().residual_variance;
            assert!(now <= last + 1e-10);
            last = now;
        }
        assert!(last.abs() < 1e-9);
    }
}

#[test]
fn identity_covariance_projection() {
    let p = 5;
    let cov = || Covariance::dense(DMatrix::identity(p, p)).unwrap();
    let beta = vec![1.0, -0.5, 0.25, 2.0, 0.0];
    let pop = Population::new(0.3, beta.clone(), (vec![0.0; p], cov()), (vec![0.0; p], cov()), 1.0).unwrap();
    let proj = population_projection(&pop, &[3, 0]).unwrap();
    assert_eq!(proj.beta, vec![2.0, 1.0]);
    assert!((proj.residual_variance - (0.25 + 0.0625)).abs() < 1e-14);
}

/// Stein's-lemma coefficients against least squares on a large test sample,
/// with sandwich standard errors.
#[test]
fn misspecified_projection_matches_large_sample_least_squares() {
    for kind in [MisspecKind::Sine, MisspecKind::Quadratic] {
        let pop = random_population(12, 4).with_misspec(Some(Misspecification { kind, amplitude: 0.8 }));
        for model in [vec![0, 2], vec![1, 2, 3]] {
            let proj = population_projection(&pop, &model).unwrap();
            let k = model.len() + 1;
            let mut r = rng(31);
            let mut x = vec![0.0; 4];
            let draws = 1_000_000;
            let mut rows = Vec::with_capacity(draws);
            let mut xtx = DMatrix::<f64>::zeros(k, k);
            let mut xty = DVector::<f64>::zeros(k);
            for _ in 0..draws {
                pop.sample_input(Domain::Test, &mut r, &mut x);
                let z = DVector::from_iterator(k, std::iter::once(1.0).chain(model.iter().map(|&j| x[j])));
                let y = pop.regression(&x);
                xtx += &z * z.transpose();
                xty += &z * y;
                rows.push((z, y));
            }
            let inv = xtx.try_inverse().unwrap();
            let coef = &inv * xty;
            let mut meat = DMatrix::<f64>::zeros(k, k);
            for (z, y) in &rows {
                let e = y - coef.dot(z);
                meat += z * z.transpose() * (e * e);
            }
            let cov = &inv * meat * &inv;
            let expected: Vec<f64> = std::iter::once(proj.alpha).chain(proj.beta.iter().cloned()).collect();
            for i in 0..k {
                let se = cov[(i, i)].sqrt();
                assert!((coef[i] - expected[i]).abs() < 3.0 * se, "{kind:?} {model:?} coef {i}: {} vs {} (se {se})", coef[i], expected[i]);
            }
        }
    }
}

#[test]
fn scenario_ratio_matches_full_densities() {
    let mut cfg = ScenarioConfig::new(50, 6);
    cfg.shift_coord = 2;
    cfg.shift_mean = 0.8;
    cfg.shift_cov = 0.4;
    let pop = make_population(&cfg).unwrap();
    let model = pop.importance_model().unwrap();
    let (cov_tr, cov_te) = (pop.cov_tr.to_dense(), pop.cov_te.to_dense());
    let mut r = rng(5);
    let mut x = vec![0.0; 6];
    for _ in 0..40 {
        pop.sample_input(Domain::Train, &mut r, &mut x);
        let oracle = gaussian_density(&x, &pop.mu_te, &cov_te) / gaussian_density(&x, &pop.mu_tr, &cov_tr);
        assert!(rel_close(raw_importance(&model, &x).unwrap(), oracle, 1e-9));
    }
}

#[test]
fn training_moments_match_population() {
    let mut cfg = ScenarioConfig::new(100_000, 5);
    cfg.shift_coord = 1;
    let pop = make_population(&cfg).unwrap();
    let draw = draw_dataset(&pop, 100_000, 2024).unwrap();
    for (domain, x) in [(Domain::Train, draw.train.x()), (Domain::Test, &draw.test_inputs)] {
        let n = x.nrows() as f64;
        let cov = pop.covariance(domain);
        for i in 0..5 {
            let mean = x.column(i).sum() / n;
            let se = (cov.entry(i, i) / n).sqrt();
            assert!((mean - pop.mean(domain)[i]).abs() < 3.0 * se, "{domain:?} mean {i}");
            for j in i..5 {
                let mj = x.column(j).sum() / n;
                let c = x.column(i).iter().zip(x.column(j).iter()).map(|(a, b)| (a - mean) * (b - mj)).sum::<f64>() / n;
                let target = cov.entry(i, j);
                let se = ((cov.entry(i, i) * cov.entry(j, j) + target * target) / n).sqrt();
                assert!((c - target).abs() < 3.0 * se, "{domain:?} cov ({i},{j}): {c} vs {target}");
            }
        }
    }
}

#[test]
fn near_noiseless_full_fit_has_zero_residuals() {
    let mut cfg = ScenarioConfig::new(40, 6);
    cfg.noise_sd = 1e-9;
    let pop = make_population(&cfg).unwrap();
    let draw = draw_dataset(&pop, 40, 8).unwrap();
    let w = WeightVector::uniform(40);
    let fit = wls_fit(&weighted_moments(&draw.train, &w).unwrap(), &[0, 1, 2, 3, 4, 5]).unwrap();
    let s2 = greedyshift::model::residual_sigma2(&draw.train, &w, &fit).unwrap();
    assert!(s2 < 1e-15, "{s2}");
}

#[test]
fn test_covariance_respects_floor() {
    for (rho, extra) in [(0.3, 0.25), (0.3, -0.5), (-0.6, 1.0), (0.0, 0.0)] {
        let mut cfg = ScenarioConfig::new(20, 9);
        cfg.rho = rho;
        cfg.shift_cov = extra;
        cfg.shift_coord = 4;
        let pop = make_population(&cfg).unwrap();
        let eig = nalgebra::SymmetricEigen::new(pop.cov_te.to_dense()).eigenvalues.min();
        assert!(eig >= pop.lambda_floor - 1e-12, "{eig} < {}", pop.lambda_floor);
    }
}

#[test]
fn no_shift_makes_iwoga_equal_oga() {
    let mut cfg = ScenarioConfig::new(80, 30);
    cfg.shift_mean = 0.0;
    cfg.shift_cov = 0.0;
    let pop = make_population(&cfg).unwrap();
    let draw = draw_dataset(&pop, 80, 1).unwrap();
    let b_n = compute_bn(80, 30, &ScheduleConfig::default()).unwrap();
    let w = build_weights(&pop.importance_model().unwrap(), draw.train.x(), b_n).unwrap();
    let a = build_path(&draw.train, &w, 20).unwrap();
    let b = build_path(&draw.train, &WeightVector::uniform(80), 20).unwrap();
    assert_eq!(a.order(), b.order());
    assert_eq!(a.sigma2_trace(), b.sigma2_trace());
}

fn sparsity_constant(beta: &[f64], xi: f64, seed: u64) -> (f64, f64) {
    let p = beta.len();
    let prefix = (1..=p).map(|m| sparsity_ratio(beta, &(0..m).collect::<Vec<_>>(), xi)).fold(0.0, f64::max);
    let mut r = rng(seed);
    let random = (0..200)
        .map(|_| {
            let subset: Vec<usize> = (0..p).filter(|_| r.random_bool(0.5)).collect();
            sparsity_ratio(beta, &subset, xi)
        })
        .fold(0.0, f64::max);
    (prefix, random)
}

#[test]
fn coefficients_satisfy_sparsity_condition() {
    for xi in [0.5, 1.0, 2.0] {
        let small = polynomial_coefficients(12, xi, 3.0);
        let (prefix, random) = sparsity_constant(&small, xi, 1);
        assert!(random <= prefix + 1e-12);
        let exhaustive = (1u32..1 << 12)
            .map(|mask| sparsity_ratio(&small, &(0..12).filter(|j| mask >> j & 1 == 1).collect::<Vec<_>>(), xi))
            .fold(0.0, f64::max);
        assert!(exhaustive <= prefix * (1.0 + 1e-12));
        // the constant must not grow with p
        let c20 = sparsity_constant(&polynomial_coefficients(20, xi, 1.0), xi, 2);
        let c2000 = sparsity_constant(&polynomial_coefficients(2000, xi, 1.0), xi, 3);
        assert!(c2000.0.max(c2000.1) <= 1.25 * c20.0.max(c20.1), "xi {xi}: {c20:?} vs {c2000:?}");
    }
    // ξ = 0 gives harmonic coefficients, whose ℓ₁ norm grows like log p
    let c20 = sparsity_constant(&polynomial_coefficients(20, 0.0, 1.0), 0.0, 4).0;
    let c2000 = sparsity_constant(&polynomial_coefficients(2000, 0.0, 1.0), 0.0, 5).0;
    assert!(c2000 > 2.0 * c20);
}
