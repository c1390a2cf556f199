//! Reproducing kernels for weighted Sobolev spaces of dominating mixed
//! smoothness on the unit cube.
//!
//! The order-`alpha` kernel factors over coordinates. With product weights it
//! is `K(x, y) = prod_j (1 + g_j * eta_alpha(x_j, y_j))`; with
//! product-and-order-dependent (POD) weights it is the order expansion
//! `K(x, y) = sum_l Gamma_l * e_l(g_1 eta_1, ..., g_s eta_s)` where `e_l` is
//! the l-th elementary symmetric polynomial. The per-coordinate block is
//!
//! ```text
//! eta_alpha(x, y) = sum_{tau=1..alpha} B_tau(x) B_tau(y) / (tau!)^2
//!                 + (-1)^(alpha+1) PB_{2 alpha}(x - y) / (2 alpha)!
//! ```
//!
//! with `B_tau` the Bernoulli polynomials and `PB` their 1-periodic
//! extensions.

use std::collections::HashMap;
use std::path::Path;

use crate::{Error, Result};

/// Coefficients of the Bernoulli polynomials `B_0 ... B_8` in descending
/// powers. Each literal is the f64 nearest to the exact rational coefficient.
const B0: [f64; 1] = [1.0];
const B1: [f64; 2] = [1.0, -0.5];
const B2: [f64; 3] = [1.0, -1.0, 1.0 / 6.0];
const B3: [f64; 4] = [1.0, -1.5, 0.5, 0.0];
const B4: [f64; 5] = [1.0, -2.0, 1.0, 0.0, -1.0 / 30.0];
const B5: [f64; 6] = [1.0, -2.5, 5.0 / 3.0, 0.0, -1.0 / 6.0, 0.0];
const B6: [f64; 7] = [1.0, -3.0, 2.5, 0.0, -0.5, 0.0, 1.0 / 42.0];
const B7: [f64; 8] = [1.0, -3.5, 3.5, 0.0, -7.0 / 6.0, 0.0, 1.0 / 6.0, 0.0];
const B8: [f64; 9] = [
    1.0,
    -4.0,
    14.0 / 3.0,
    0.0,
    -7.0 / 3.0,
    0.0,
    2.0 / 3.0,
    0.0,
    -1.0 / 30.0,
];

const BERNOULLI: [&[f64]; 9] = [&B0, &B1, &B2, &B3, &B4, &B5, &B6, &B7, &B8];

/// `1 / (tau!)^2` for `tau = 0..=4`.
const INV_FACT_SQ: [f64; 5] = [1.0, 1.0, 0.25, 1.0 / 36.0, 1.0 / 576.0];

/// `1 / (2 alpha)!` for `alpha = 0..=4` (index 0 unused).
const INV_FACT_2ALPHA: [f64; 5] = [0.0, 0.5, 1.0 / 24.0, 1.0 / 720.0, 1.0 / 40320.0];

/// `(-1)^(alpha + 1)` for `alpha = 0..=4` (index 0 unused).
const PERIODIC_SIGN: [f64; 5] = [0.0, 1.0, -1.0, 1.0, -1.0];

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// Evaluates the Bernoulli polynomial `B_tau(x)` for `tau <= 8`.
pub fn bernoulli_poly(tau: usize, x: f64) -> Result<f64> {
    let coeffs = BERNOULLI
        .get(tau)
        .ok_or(Error::UnsupportedBernoulliDegree { degree: tau as u32 })?;
    Ok(horner(coeffs, x))
}

/// Evaluates the 1-periodic Bernoulli polynomial `PB_order(t)` for the even
/// orders 2, 4, 6, 8 that appear in the kernels.
///
/// The argument is reduced to `t - floor(t)`, which is correct for negative
/// `t` as well. The reduction can round up to exactly 1.0 when `t` sits just
/// below an integer; that case is folded back to 0 so the extension is
/// exactly periodic at integers.
pub fn periodic_bernoulli(order: usize, t: f64) -> Result<f64> {
    if !matches!(order, 2 | 4 | 6 | 8) {
        return Err(Error::UnsupportedBernoulliDegree { degree: order as u32 });
    }
    let mut frac = t - t.floor();
    if frac == 1.0 {
        frac = 0.0;
    }
    Ok(horner(BERNOULLI[order], frac))
}

fn check_alpha(alpha: u32) -> Result<()> {
    if (1..=4).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::UnsupportedAlpha { alpha })
    }
}

/// Per-coordinate kernel block `eta_alpha` on `[0,1]^2`.
pub fn eta_alpha(alpha: u32, x: f64, y: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(eta_unchecked(alpha, x, y))
}

/// The periodic part is evaluated at `|x - y|`, which lies in `[0, 1]` and
/// equals the periodic reduction of `x - y` for even orders. Swapping the
/// arguments then reproduces the same float operations in the same order, so
/// `eta_unchecked(a, x, y)` and `eta_unchecked(a, y, x)` agree to the bit.
fn eta_unchecked(alpha: u32, x: f64, y: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
    let a = alpha as usize;
    let mut acc = 0.0;
    for tau in 1..=a {
        let coeffs = BERNOULLI[tau];
        acc += horner(coeffs, x) * horner(coeffs, y) * INV_FACT_SQ[tau];
    }
    let mut diff = (x - y).abs();
    if diff == 1.0 {
        diff = 0.0;
    }
    acc + PERIODIC_SIGN[a] * INV_FACT_2ALPHA[a] * horner(BERNOULLI[2 * a], diff)
}

/// Coordinate weights attached to subsets of variables.
///
/// A subset `u` of coordinates carries the weight `prod_{j in u} g_j`
/// (product weights) or `Gamma_{|u|} * prod_{j in u} g_j`
/// (product-and-order-dependent weights), where `g_j` are the per-coordinate
/// factors `gamma_tilde`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoordinateWeights {
    Product {
        gamma_tilde: Vec<f64>,
    },
    Pod {
        gamma_tilde: Vec<f64>,
        /// `gamma_order[l]` scales all subsets of cardinality `l`; length
        /// `s + 1` with `gamma_order[0] = 1` so the empty subset has unit
        /// weight.
        gamma_order: Vec<f64>,
    },
}

fn validate_gamma_tilde(gamma_tilde: &[f64]) -> Result<()> {
    if gamma_tilde.is_empty() {
        return Err(Error::InvalidWeights(
            "at least one coordinate weight is required".into(),
        ));
    }
    for (j, &g) in gamma_tilde.iter().enumerate() {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::ParameterOutOfRange { index: j, value: g });
        }
    }
    Ok(())
}

impl CoordinateWeights {
    pub fn product(gamma_tilde: Vec<f64>) -> Result<Self> {
        validate_gamma_tilde(&gamma_tilde)?;
        Ok(CoordinateWeights::Product { gamma_tilde })
    }

    /// POD weights require `gamma_order` of length `s + 1` with
    /// `gamma_order[0] = 1`; later entries may be zero to truncate the
    /// interaction order.
    pub fn pod(gamma_tilde: Vec<f64>, gamma_order: Vec<f64>) -> Result<Self> {
        validate_gamma_tilde(&gamma_tilde)?;
        if gamma_order.len() != gamma_tilde.len() + 1 {
            return Err(Error::DimensionMismatch {
                context: "POD order weights",
                expected: gamma_tilde.len() + 1,
                actual: gamma_order.len(),
            });
        }
        if gamma_order[0] != 1.0 {
            return Err(Error::InvalidWeights(format!(
                "order weight for the empty subset must be 1, got {}",
                gamma_order[0]
            )));
        }
        for (l, &g) in gamma_order.iter().enumerate() {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::ParameterOutOfRange { index: l, value: g });
            }
        }
        Ok(CoordinateWeights::Pod {
            gamma_tilde,
            gamma_order,
        })
    }

    pub fn dimension(&self) -> usize {
        self.gamma_tilde().len()
    }

    pub fn gamma_tilde(&self) -> &[f64] {
        match self {
            CoordinateWeights::Product { gamma_tilde } => gamma_tilde,
            CoordinateWeights::Pod { gamma_tilde, .. } => gamma_tilde,
        }
    }
}

/// A fully specified cubature kernel: smoothness order and coordinate
/// weights.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    alpha: u32,
    weights: CoordinateWeights,
}

impl KernelSpec {
    /// Smoothness orders 1 through 4 are supported; higher orders would need
    /// Bernoulli polynomials beyond degree 8.
    pub fn new(alpha: u32, weights: CoordinateWeights) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(KernelSpec { alpha, weights })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn weights(&self) -> &CoordinateWeights {
        &self.weights
    }

    pub fn dimension(&self) -> usize {
        self.weights.dimension()
    }

    /// Evaluates `K(x, y)`. Cost is `O(s)` for product weights and `O(s^2)`
    /// for POD weights.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let s = self.dimension();
        if x.len() != s {
            return Err(Error::DimensionMismatch {
                context: "kernel first argument",
                expected: s,
                actual: x.len(),
            });
        }
        if y.len() != s {
            return Err(Error::DimensionMismatch {
                context: "kernel second argument",
                expected: s,
                actual: y.len(),
            });
        }
        Ok(Evaluator::new(self).eval(x, y))
    }
}

/// Reusable evaluation scratch so that bulk callers (Gram assembly) do not
/// allocate per point pair.
pub(crate) struct Evaluator<'a> {
    spec: &'a KernelSpec,
    etas: Vec<f64>,
    esym: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(spec: &'a KernelSpec) -> Self {
        let s = spec.dimension();
        Evaluator {
            spec,
            etas: vec![0.0; s],
            esym: vec![0.0; s + 1],
        }
    }

    /// Dimensions must already match the spec.
    pub(crate) fn eval(&mut self, x: &[f64], y: &[f64]) -> f64 {
        let alpha = self.spec.alpha;
        for (e, (&xj, &yj)) in self.etas.iter_mut().zip(x.iter().zip(y)) {
            *e = eta_unchecked(alpha, xj, yj);
        }
        match &self.spec.weights {
            CoordinateWeights::Product { gamma_tilde } => {
                let mut prod = 1.0;
                for (g, e) in gamma_tilde.iter().zip(&self.etas) {
                    prod *= 1.0 + g * e;
                }
                prod
            }
            CoordinateWeights::Pod {
                gamma_tilde,
                gamma_order,
            } => {
                // esym[l] accumulates the l-th elementary symmetric
                // polynomial of the terms g_j * eta_j via the standard
                // one-pass recursion; the reverse inner loop keeps each
                // update free of already-updated entries.
                self.esym.fill(0.0);
                self.esym[0] = 1.0;
                for (j, (g, e)) in gamma_tilde.iter().zip(&self.etas).enumerate() {
                    let term = g * e;
                    for l in (1..=j + 1).rev() {
                        self.esym[l] += term * self.esym[l - 1];
                    }
                }
                gamma_order
                    .iter()
                    .zip(&self.esym)
                    .map(|(g, e)| g * e)
                    .sum()
            }
        }
    }
}

/// Parses a kernel description in plain-text key-value form:
///
/// ```text
/// # comment
/// scheme = product        # or POD
/// alpha = 2
/// s = 3
/// gamma_tilde = 1.0 0.5 0.25
/// Gamma = 1 1 2 6         # POD only, s + 1 entries
/// ```
pub fn parse_kernel_spec(text: &str) -> Result<KernelSpec> {
    let mut fields: HashMap<&str, (usize, String)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = split_key_value(line).ok_or_else(|| {
            Error::InvalidConfig(format!("line {lineno}: expected `key = value`, got `{line}`"))
        })?;
        let key = match key {
            "scheme" | "alpha" | "s" | "gamma_tilde" | "Gamma" => key,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "line {lineno}: unknown key `{other}`"
                )))
            }
        };
        if fields.insert(key, (lineno, value.to_string())).is_some() {
            return Err(Error::InvalidConfig(format!(
                "line {lineno}: duplicate key `{key}`"
            )));
        }
    }

    let take = |key: &str| -> Result<(usize, String)> {
        fields
            .get(key)
            .cloned()
            .ok_or_else(|| Error::InvalidConfig(format!("missing key `{key}`")))
    };

    let (lineno, scheme) = take("scheme")?;
    let pod = match scheme.to_ascii_lowercase().as_str() {
        "product" => false,
        "pod" => true,
        other => {
            return Err(Error::InvalidConfig(format!(
                "line {lineno}: scheme must be `product` or `POD`, got `{other}`"
            )))
        }
    };
    let (lineno, alpha) = take("alpha")?;
    let alpha: u32 = alpha.parse().map_err(|_| {
        Error::InvalidConfig(format!("line {lineno}: alpha must be an integer"))
    })?;
    let (lineno, s) = take("s")?;
    let s: usize = s.parse().map_err(|_| {
        Error::InvalidConfig(format!("line {lineno}: s must be a positive integer"))
    })?;
    let (lineno, gamma_tilde) = take("gamma_tilde")?;
    let gamma_tilde = parse_f64_list(&gamma_tilde, lineno, "gamma_tilde")?;
    if gamma_tilde.len() != s {
        return Err(Error::InvalidConfig(format!(
            "line {lineno}: gamma_tilde has {} entries, expected s = {s}",
            gamma_tilde.len()
        )));
    }

    let weights = if pod {
        let (lineno, gamma_order) = take("Gamma")?;
        let gamma_order = parse_f64_list(&gamma_order, lineno, "Gamma")?;
        if gamma_order.len() != s + 1 {
            return Err(Error::InvalidConfig(format!(
                "line {lineno}: Gamma has {} entries, expected s + 1 = {}",
                gamma_order.len(),
                s + 1
            )));
        }
        CoordinateWeights::pod(gamma_tilde, gamma_order)?
    } else {
        if let Some((lineno, _)) = fields.get("Gamma") {
            return Err(Error::InvalidConfig(format!(
                "line {lineno}: Gamma is only valid with scheme = POD"
            )));
        }
        CoordinateWeights::product(gamma_tilde)?
    };
    KernelSpec::new(alpha, weights)
}

pub fn load_kernel_spec(path: &Path) -> Result<KernelSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_kernel_spec(&text).map_err(|e| match e {
        Error::InvalidConfig(msg) => {
            Error::InvalidConfig(format!("{}: {msg}", path.display()))
        }
        other => other,
    })
}

fn split_key_value(line: &str) -> Option<(&str, &str)> {
    let (key, value) = line.split_once('=')?;
    let key = key.trim();
    let value = value.trim();
    if key.is_empty() || value.is_empty() {
        None
    } else {
        Some((key, value))
    }
}

fn parse_f64_list(value: &str, lineno: usize, key: &str) -> Result<Vec<f64>> {
    value
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!(
                    "line {lineno}: {key} entry `{tok}` is not a number"
                ))
            })
        })
        .collect()
}
