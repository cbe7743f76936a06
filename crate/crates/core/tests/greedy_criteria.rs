mod common;

use common::*;
use proptest::prelude::*;

use greedyshift::criteria::{hdic_value, hdiwic_value, select_k};
use greedyshift::greedy::{build_path, build_path_with, greedy_step, PathOptions};
use greedyshift::model::{Dataset, WeightVector, WeightedDesign};
use greedyshift::weighting::{compute_cn, compute_dn, ScheduleConfig};
use greedyshift::Execution;

fn assert_matches_reference(data: &Dataset, w: &WeightVector, k: usize) {
    let path = build_path(data, w, k).unwrap();
    let reference = reference_path(data, w.as_slice(), path.len());
    assert_eq!(path.order(), reference.order.as_slice());
    for i in 0..path.len() {
        let fit = path.fit(i + 1);
        assert!(rel_close(fit.alpha, reference.alphas[i], 1e-8));
        for (a, b) in fit.beta.iter().zip(&reference.betas[i]) {
            assert!(rel_close(*a, *b, 1e-8), "{a} vs {b}");
        }
        assert!(rel_close(path.sigma2_trace()[i], reference.sigma2[i], 1e-8));
    }
}

#[test]
fn unit_weight_path_matches_reference() {
    for seed in 0..5 {
        let (data, _) = random_instance(seed, 40, 12);
        assert_matches_reference(&data, &WeightVector::uniform(40), 10);
    }
}

#[test]
fn weighted_path_matches_reference() {
    for seed in 10..15 {
        let (data, w) = random_instance(seed, 40, 12);
        assert_matches_reference(&data, &w, 10);
    }
}

#[test]
fn step_matches_exhaustive_scan() {
    let (data, w) = random_instance(21, 30, 9);
    let design = WeightedDesign::new(&data, &w).unwrap();
    let n = 30;
    let x = data.x();
    let mu: Vec<f64> = (0..9).map(|j| (0..n).map(|t| w.as_slice()[t] * x[(t, j)]).sum::<f64>() / n as f64).collect();
    let resid: Vec<f64> = data.y().iter().map(|y| y * 0.7 - 1.0).collect();
    for current in [vec![], vec![3], vec![0, 5, 8]] {
        let scores: Vec<(usize, f64)> = (0..9)
            .filter(|j| !current.contains(j))
            .map(|j| {
                let v: f64 = (0..n).map(|t| w.as_slice()[t] * (x[(t, j)] - mu[j]).powi(2)).sum();
                let c: f64 = (0..n).map(|t| w.as_slice()[t] * (x[(t, j)] - mu[j]) * resid[t]).sum();
                (j, c.abs() / v.sqrt())
            })
            .collect();
        let best = scores.iter().fold(scores[0], |b, s| if s.1 > b.1 { *s } else { b }).0;
        for exec in [Execution::Serial, Execution::Parallel] {
            assert_eq!(greedy_step(&design, &current, &resid, exec).unwrap(), Some(best));
        }
    }
}

#[test]
fn single_step_on_exact_dependence() {
    let (base, _) = random_instance(2, 15, 4);
    let y = base.column(2).to_vec();
    let data = Dataset::new(base.x().clone(), y).unwrap();
    let path = build_path(&data, &WeightVector::uniform(15), 1).unwrap();
    assert_eq!(path.models().collect::<Vec<_>>(), vec![&[2usize][..]]);
}

#[test]
fn unit_weights_and_q_above_one_give_hdic() {
    let cfg = ScheduleConfig::default();
    for seed in 0..10 {
        let (data, _) = random_instance(seed, 30, 8);
        let path = build_path(&data, &WeightVector::uniform(30), 6).unwrap();
        let d_n = compute_dn(30, 8, &cfg).unwrap();
        let c_n = compute_cn(30, 8).unwrap();
        for (k, &s) in path.sigma2_trace().iter().enumerate() {
            let a = hdiwic_value(s, k + 1, d_n, cfg.s_a);
            let b = hdic_value(s, k + 1, c_n, cfg.s_a);
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }
}

#[test]
fn serial_and_parallel_paths_agree() {
    let (data, w) = random_instance(77, 60, 40);
    let run = |execution| {
        build_path_with(&data, &w, 30, &PathOptions { execution, ..PathOptions::default() }).unwrap()
    };
    let (a, b) = (run(Execution::Serial), run(Execution::Parallel));
    assert_eq!(a.order(), b.order());
    assert_eq!(a.sigma2_trace(), b.sigma2_trace());
}

fn instance() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 12usize..=40, 3usize..=15)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn paths_are_nested_and_sigma2_non_increasing((seed, n, p) in instance()) {
        let (data, w) = random_instance(seed, n, p);
        let path = build_path(&data, &w, p).unwrap();
        for k in 1..path.len() {
            prop_assert_eq!(path.model(k).len(), k);
            prop_assert_eq!(path.model(k), &path.model(k + 1)[..k]);
            prop_assert!(path.sigma2_trace()[k] <= path.sigma2_trace()[k - 1] + 1e-10);
        }
    }

    #[test]
    fn rescaled_weights_give_same_path((seed, n, p) in instance(), c in 0.01f64..100.0) {
        let (data, w) = random_instance(seed, n, p);
        let scaled = WeightVector::normalize(w.as_slice().iter().map(|v| v * c).collect()).unwrap();
        let a = build_path(&data, &w, p).unwrap();
        let b = build_path(&data, &scaled, p).unwrap();
        prop_assert_eq!(a.order(), b.order());
    }

    #[test]
    fn column_permutation_is_equivariant((seed, n, p) in instance(), shift in 1usize..15) {
        let (data, w) = random_instance(seed, n, p);
        let order: Vec<usize> = (0..p).map(|j| (j + shift) % p).collect();
        let permuted = data.permute_columns(&order).unwrap();
        let a = build_path(&data, &w, p).unwrap();
        let b = build_path(&permuted, &w, p).unwrap();
        let mapped: Vec<usize> = b.order().iter().map(|&j| order[j]).collect();
        prop_assert_eq!(a.order(), mapped.as_slice());
    }

    #[test]
    fn response_scaling_keeps_selection((seed, n, p) in instance(), c in 0.1f64..10.0) {
        let (data, w) = random_instance(seed, n, p);
        let scaled = Dataset::new(data.x().clone(), data.y().iter().map(|v| v * c).collect()).unwrap();
        let a = build_path(&data, &w, p).unwrap();
        let b = build_path(&scaled, &w, p).unwrap();
        prop_assert_eq!(a.order(), b.order());
        let ta = select_k(&a, 0.2, 2.0).unwrap();
        let tb = select_k(&b, 0.2, 2.0).unwrap();
        prop_assert_eq!(ta.selected_k, tb.selected_k);
        for (x, y) in ta.values.iter().zip(&tb.values) {
            prop_assert!((x * c * c - y).abs() < 1e-9 * y.abs().max(1e-12));
        }
    }

    #[test]
    fn larger_penalty_never_selects_larger_model((seed, n, p) in instance()) {
        let (data, w) = random_instance(seed, n, p);
        let path = build_path(&data, &w, p).unwrap();
        let mut last = usize::MAX;
        for s_a in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0] {
            let k = select_k(&path, 0.15, s_a).unwrap().selected_k;
            prop_assert!(k <= last);
            last = k;
        }
    }
}
