//! Ordinary least-squares convergence-rate fits in log2-log2 coordinates.

use crate::{Error, Result};

/// Result of fitting `log2(err) ~ intercept + slope * log2(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Number of (n, err) pairs that entered the fit.
    pub used: usize,
}

/// Fits the power law `err ~ C * n^slope` by least squares on the log-log
/// pairs. Nonpositive or non-finite errors cannot enter the fit; they are
/// dropped with a warning, since an exact zero usually means an estimate
/// coincided with its own reference value.
pub fn fit_rate(ns: &[f64], errs: &[f64]) -> Result<RateFit> {
    if ns.len() != errs.len() {
        return Err(Error::DimensionMismatch {
            context: "rate fit",
            expected: ns.len(),
            actual: errs.len(),
        });
    }
    let pairs: Vec<(f64, f64)> = ns
        .iter()
        .zip(errs)
        .filter(|(&n, &e)| n > 0.0 && e > 0.0 && n.is_finite() && e.is_finite())
        .map(|(&n, &e)| (n.log2(), e.log2()))
        .collect();
    let dropped = ns.len() - pairs.len();
    if dropped > 0 {
        log::warn!("rate fit dropped {dropped} pairs with nonpositive or non-finite entries");
    }
    if pairs.len() < 3 {
        return Err(Error::InsufficientRateData {
            needed: 3,
            got: pairs.len(),
        });
    }
    let m = pairs.len() as f64;
    let xbar = pairs.iter().map(|p| p.0).sum::<f64>() / m;
    let ybar = pairs.iter().map(|p| p.1).sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &pairs {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidConfig(
            "rate fit needs at least two distinct n values".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(RateFit {
        slope,
        intercept: ybar - slope * xbar,
        used: pairs.len(),
    })
}
