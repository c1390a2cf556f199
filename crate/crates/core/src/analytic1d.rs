//! Closed-form identities for the order-1, unit-weight kernel over the
//! one-dimensional left-Riemann lattice `t_k = k/n`.
//!
//! For this configuration the optimal cubature weights, the worst-case
//! error, the Gram double sum, and two gap quantities of the integration
//! representer all have exact rational forms. They serve as independent
//! oracles for the generic Gram/solve/WCE pipeline; everything here is pure
//! arithmetic on quantities that stay well inside the exact-integer range of
//! f64 for any practical n.

use crate::{Error, Result};

fn require(op: &'static str, min: u64, n: u64) -> Result<f64> {
    if n < min {
        Err(Error::DomainTooSmall { op, min, n })
    } else {
        Ok(n as f64)
    }
}

/// `12n^3 + n + 3`, the common denominator of the closed forms.
fn denom(nf: f64) -> f64 {
    12.0 * nf * nf * nf + nf + 3.0
}

/// Optimal cubature weights: `w_0 = 6n^2 / (12n^3 + n + 3)`, doubled in the
/// interior, tripled at the last node. The two-point case already follows
/// the pattern; n = 1 would make the first and last node coincide and is
/// refused.
pub fn closed_form_weights(n: u64) -> Result<Vec<f64>> {
    let nf = require("closed_form_weights", 2, n)?;
    let w0 = 6.0 * nf * nf / denom(nf);
    let mut w = vec![2.0 * w0; n as usize];
    w[0] = w0;
    w[n as usize - 1] = 3.0 * w0;
    Ok(w)
}

/// Squared worst-case error at the optimal weights,
/// `1 - sum_k w_k = (n + 3) / (12n^3 + n + 3)`.
pub fn optimal_wce_sq(n: u64) -> Result<f64> {
    let nf = require("optimal_wce_sq", 2, n)?;
    Ok((nf + 3.0) / denom(nf))
}

/// `sum_{k,l} K(t_k, t_l) = (3n^2 + 1) / 3`.
pub fn gram_double_sum(n: u64) -> Result<f64> {
    let nf = require("gram_double_sum", 1, n)?;
    Ok((3.0 * nf * nf + 1.0) / 3.0)
}

/// Gap of the weighted kernel interpolant below the constant representer at
/// the right boundary: `1 - sum_k w_k K(1, t_k) = 6n / (12n^3 + n + 3)`.
pub fn boundary_gap(n: u64) -> Result<f64> {
    let nf = require("boundary_gap", 2, n)?;
    Ok(6.0 * nf / denom(nf))
}

/// Squared L2(0,1) distance between the constant representer and the
/// weighted kernel interpolant: `6n(n + 15) / (5 (12n^3 + n + 3)^2)`.
pub fn embedding_gap_l2_sq(n: u64) -> Result<f64> {
    let nf = require("embedding_gap_l2_sq", 2, n)?;
    let d = denom(nf);
    Ok(6.0 * nf * (nf + 15.0) / (5.0 * d * d))
}

/// The order-1, unit-weight kernel in its explicit one-dimensional form
/// `K(x, y) = 1 + B_2(|x - y|) / 2 + (x - 1/2)(y - 1/2)`, for cross-checking
/// the generic product construction.
pub fn explicit_kernel(x: f64, y: f64) -> f64 {
    let b2 = crate::kernel::bernoulli_poly(2, (x - y).abs()).expect("degree 2 is tabulated");
    1.0 + b2 / 2.0 + (x - 0.5) * (y - 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{CoordinateWeights, KernelSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(actual: &[f64], expected: &[f64]) {
        assert_eq!(actual.len(), expected.len());
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() <= 1e-15, "{a} vs {e}");
        }
    }

    #[test]
    fn weights_match_hand_evaluations() {
        let w2 = closed_form_weights(2).unwrap();
        assert_close(&w2, &[24.0 / 101.0, 72.0 / 101.0]);
        assert!((w2.iter().sum::<f64>() - 96.0 / 101.0).abs() < 1e-15);

        let w4 = closed_form_weights(4).unwrap();
        assert_close(
            &w4,
            &[96.0 / 775.0, 192.0 / 775.0, 192.0 / 775.0, 288.0 / 775.0],
        );
    }

    #[test]
    fn scalar_identities_match_hand_evaluations() {
        assert_eq!(optimal_wce_sq(2).unwrap(), 5.0 / 101.0);
        assert_eq!(gram_double_sum(1).unwrap(), 4.0 / 3.0);
        assert_eq!(gram_double_sum(2).unwrap(), 13.0 / 3.0);
        assert_eq!(gram_double_sum(8).unwrap(), 193.0 / 3.0);
        assert_eq!(boundary_gap(2).unwrap(), 12.0 / 101.0);
        assert_eq!(boundary_gap(4).unwrap(), 24.0 / 775.0);
        assert_eq!(embedding_gap_l2_sq(2).unwrap(), 204.0 / 51005.0);
    }

    #[test]
    fn weights_and_wce_are_consistent() {
        for n in [2u64, 3, 7, 64, 513] {
            let w = closed_form_weights(n).unwrap();
            let gap = 1.0 - crate::neumaier_sum(w.iter().copied());
            assert!((gap - optimal_wce_sq(n).unwrap()).abs() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn asymptotic_scalings() {
        let n = 1u64 << 10;
        let nf = n as f64;
        let gap = embedding_gap_l2_sq(n).unwrap() * nf.powi(4);
        assert!((gap - 1.0 / 120.0).abs() < 0.02 / 120.0);
        let boundary = boundary_gap(n).unwrap() * nf * nf;
        assert!((boundary - 0.5).abs() < 0.02 * 0.5);
    }

    #[test]
    fn small_n_is_refused() {
        assert!(closed_form_weights(1).is_err());
        assert!(closed_form_weights(0).is_err());
        assert!(optimal_wce_sq(1).is_err());
        assert!(boundary_gap(1).is_err());
        assert!(embedding_gap_l2_sq(1).is_err());
        assert!(gram_double_sum(0).is_err());
        assert!(gram_double_sum(1).is_ok());
    }

    #[test]
    fn explicit_form_matches_generic_kernel() {
        let spec = KernelSpec::new(1, CoordinateWeights::product(vec![1.0]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let x: f64 = rng.gen();
            let y: f64 = rng.gen();
            let a = explicit_kernel(x, y);
            let b = spec.eval(&[x], &[y]).unwrap();
            assert!((a - b).abs() < 1e-15, "x = {x}, y = {y}");
        }
        assert!((explicit_kernel(0.0, 0.0) - 4.0 / 3.0).abs() < 1e-16);
    }
}
