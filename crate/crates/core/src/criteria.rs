//! HDIWIC, HDIWIC_s and HDIC along a greedy path.
//!
//! All three share the form `(1 + s_a (#J + 1) r²) σ̂²(J)`; they differ in
//! the rate `r` (`d_n` or `c_n`) and in which weights produced `σ̂²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::GreedyPath;

/// `(1 + s_a (#J + 1) d_n²) σ̂²(J)`.
pub fn hdiwic_value(sigma2: f64, model_size: usize, d_n: f64, s_a: f64) -> f64 {
    penalized(sigma2, model_size, d_n, s_a)
}

/// `(1 + s_a (#J + 1) c_n²) σ̂_tr²(J)`.
pub fn hdic_value(sigma2_tr: f64, model_size: usize, c_n: f64, s_a: f64) -> f64 {
    penalized(sigma2_tr, model_size, c_n, s_a)
}

#[inline]
fn penalized(sigma2: f64, model_size: usize, rate: f64, s_a: f64) -> f64 {
    (1.0 + s_a * (model_size as f64 + 1.0) * rate * rate) * sigma2
}

/// Criterion values along a path and the first minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionTrace {
    pub values: Vec<f64>,
    pub penalty_rate: f64,
    pub s_a: f64,
    /// 1-based iteration count.
    pub selected_k: usize,
}

/// Minimizes the criterion over `k = 1..=K` of a residual-variance trace in
/// which entry `k − 1` belongs to a model of size `k`.
pub fn select_from_trace(sigma2: &[f64], penalty_rate: f64, s_a: f64) -> Result<CriterionTrace> {
    if sigma2.is_empty() {
        return Err(Error::Invalid("cannot select from an empty path".into()));
    }
    let values: Vec<f64> = sigma2
        .iter()
        .enumerate()
        .map(|(i, &s)| penalized(s, i + 1, penalty_rate, s_a))
        .collect();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    Ok(CriterionTrace {
        values,
        penalty_rate,
        s_a,
        selected_k: best + 1,
    })
}

/// `arg min_k` of the criterion over the path (ties to the smaller `k`).
pub fn select_k(path: &GreedyPath, penalty_rate: f64, s_a: f64) -> Result<CriterionTrace> {
    select_from_trace(path.sigma2_trace(), penalty_rate, s_a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(hdiwic_value(1.0, 1, 0.5, 2.0), 2.0);
        assert_eq!(hdiwic_value(0.7, 5, 0.0, 2.0), 0.7);
        assert!((hdic_value(2.0, 3, 0.1, 1.0) - 2.08).abs() < 1e-15);
        assert!(hdic_value(1.0, 4, 0.1, 1.0) > hdic_value(1.0, 3, 0.1, 1.0));
        assert_eq!(hdiwic_value(0.3, 4, 0.2, 2.0), hdic_value(0.3, 4, 0.2, 2.0));
    }

    #[test]
    fn hand_enumerated_three_step_trace() {
        // s_a r² = 0.1: values (1.0·1.2, 0.5·1.3, 0.49·1.4) = (1.2, 0.65, 0.686)
        let trace = select_from_trace(&[1.0, 0.5, 0.49], 0.1f64.sqrt(), 1.0).unwrap();
        let expect = [1.2, 0.65, 0.686];
        for (v, e) in trace.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(trace.selected_k, 2);
    }

    #[test]
    fn flat_trace_picks_one() {
        assert_eq!(select_from_trace(&[0.4; 6], 0.2, 2.0).unwrap().selected_k, 1);
    }

    #[test]
    fn zero_penalty_picks_last_or_first_tie() {
        assert_eq!(select_from_trace(&[3.0, 2.0, 1.0], 0.2, 0.0).unwrap().selected_k, 3);
        assert_eq!(select_from_trace(&[3.0, 1.0, 1.0], 0.2, 0.0).unwrap().selected_k, 2);
    }

    #[test]
    fn empty_trace_rejected() {
        assert!(select_from_trace(&[], 0.1, 1.0).is_err());
    }
}
