//! Gram systems, optimal cubature weights, and worst-case errors.
//!
//! For nodes `t_0, ..., t_{n-1}` and kernel `K`, the Gram matrix holds
//! `K(t_k, t_l)`. The optimal cubature weights solve `G w = 1`, and the
//! worst-case error of an arbitrary weight vector is
//!
//! ```text
//! e(w)^2 = 1 - 2 sum_k w_k + sum_{k,l} w_k w_l K(t_k, t_l).
//! ```
//!
//! Evaluated literally, the three O(1) terms cancel and the result loses all
//! accuracy once `e(w)` approaches `sqrt(eps)`. The implementation regroups
//! the expression exactly as
//!
//! ```text
//! e(w)^2 = (1 - sigma)^2 + sum_{k,l} w_k w_l (K(t_k, t_l) - 1),
//! sigma  = sum_k w_k,
//! ```
//!
//! where both terms are nonnegative (the shifted kernel `K - 1` is itself
//! positive semidefinite because the kernels here have unit mean embedding),
//! and accumulates them with compensated summation. At the optimal weights
//! the error reduces to `e^2 = 1 - sum_k w_k`, used directly.

use std::io::{Read as _, Write as _};
use std::path::Path;

use nalgebra::DMatrix;

use crate::kernel::{Evaluator, KernelSpec};
use crate::points::PointSet;
use crate::sum::{neumaier_sum, Accumulator};
use crate::{Error, Result};

/// Kernel Gram matrix over a point set; symmetric by construction because
/// each unordered pair is evaluated once and mirrored.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    matrix: DMatrix<f64>,
}

/// Evaluates `K(t_k, t_l)` for every pair of nodes. Point sets with
/// coinciding nodes are rejected because their Gram matrix is singular.
pub fn assemble_gram(spec: &KernelSpec, points: &PointSet) -> Result<GramMatrix> {
    if points.dimension() != spec.dimension() {
        return Err(Error::DimensionMismatch {
            context: "gram assembly",
            expected: spec.dimension(),
            actual: points.dimension(),
        });
    }
    if points.is_empty() {
        return Err(Error::DomainTooSmall {
            op: "assemble_gram",
            min: 1,
            n: 0,
        });
    }
    if let Some((first, second)) = points.find_duplicate() {
        return Err(Error::DuplicateNodes { first, second });
    }
    let n = points.len();
    let mut matrix = DMatrix::zeros(n, n);
    let mut eval = Evaluator::new(spec);
    for k in 0..n {
        let xk = points.node(k);
        for l in k..n {
            let v = eval.eval(xk, points.node(l));
            matrix[(k, l)] = v;
            matrix[(l, k)] = v;
        }
    }
    Ok(GramMatrix { matrix })
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `sum_{k,l} K(t_k, t_l)` with compensated accumulation.
    pub fn double_sum(&self) -> f64 {
        neumaier_sum(self.matrix.iter().copied())
    }

    /// `v' G v` with compensated accumulation.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        let n = self.n();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                context: "quadratic form",
                expected: n,
                actual: v.len(),
            });
        }
        let mut acc = Accumulator::new();
        for k in 0..n {
            for l in 0..n {
                acc.add(v[k] * v[l] * self.matrix[(k, l)]);
            }
        }
        Ok(acc.value())
    }

    /// Solves `G c = rhs` by Cholesky factorization, e.g. for kernel
    /// interpolation coefficients.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                context: "gram solve",
                expected: n,
                actual: rhs.len(),
            });
        }
        let chol = self
            .matrix
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite)?;
        let c = chol.solve(&nalgebra::DVector::from_column_slice(rhs));
        Ok(c.data.into())
    }

    /// `max_k |(G w)_k - 1|`, the residual of the optimal-weight system.
    pub fn max_residual(&self, w: &[f64]) -> Result<f64> {
        let n = self.n();
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                context: "residual",
                expected: n,
                actual: w.len(),
            });
        }
        let mut worst = 0.0f64;
        for k in 0..n {
            let mut acc = Accumulator::new();
            acc.add(-1.0);
            for l in 0..n {
                acc.add(self.matrix[(k, l)] * w[l]);
            }
            worst = worst.max(acc.value().abs());
        }
        Ok(worst)
    }
}

/// Solves `G w = 1` by Cholesky factorization followed by two sweeps of
/// iterative refinement with compensated residuals. The system is never
/// regularized; a factorization failure reports the matrix as is.
pub fn solve_optimal_weights(gram: &GramMatrix) -> Result<Vec<f64>> {
    let n = gram.n();
    let chol = gram
        .matrix
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?;
    let ones = nalgebra::DVector::from_element(n, 1.0);
    let mut w = chol.solve(&ones);
    let mut residual = nalgebra::DVector::zeros(n);
    for _ in 0..2 {
        for k in 0..n {
            let mut acc = Accumulator::new();
            acc.add(1.0);
            for l in 0..n {
                acc.add(-gram.matrix[(k, l)] * w[l]);
            }
            residual[k] = acc.value();
        }
        let correction = chol.solve(&residual);
        w += correction;
    }
    Ok(w.data.into())
}

/// A cubature rule: nodes plus one weight per node.
#[derive(Debug, Clone, PartialEq)]
pub struct CubatureRule {
    points: PointSet,
    weights: Vec<f64>,
}

impl CubatureRule {
    /// The plain quasi-Monte Carlo rule with weights `1/n`.
    pub fn equal_weight(points: PointSet) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DomainTooSmall {
                op: "equal_weight",
                min: 1,
                n: 0,
            });
        }
        let n = points.len();
        let weights = vec![1.0 / n as f64; n];
        Ok(CubatureRule { points, weights })
    }

    /// Weights from the kernel Gram system `G w = 1`.
    pub fn optimal(spec: &KernelSpec, points: PointSet) -> Result<Self> {
        let gram = assemble_gram(spec, &points)?;
        let weights = solve_optimal_weights(&gram)?;
        Ok(CubatureRule { points, weights })
    }

    pub fn from_weights(points: PointSet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.len() {
            return Err(Error::DimensionMismatch {
                context: "cubature weights",
                expected: points.len(),
                actual: weights.len(),
            });
        }
        if let Some(bad) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::InvalidWeights(format!(
                "weight {bad} is not finite"
            )));
        }
        Ok(CubatureRule { points, weights })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_k w_k f(t_k)` with compensated accumulation.
    pub fn apply<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = Accumulator::new();
        for (k, w) in self.weights.iter().enumerate() {
            acc.add(w * f(self.points.node(k)));
        }
        acc.value()
    }
}

/// Maps a squared worst-case error to the error itself. Round-off may push
/// the exact-zero case slightly negative; values in `[-1e-12, 0)` clamp to
/// zero and anything more negative is reported as an error.
fn sqrt_clamped(radicand: f64) -> Result<f64> {
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -1e-12 {
        Ok(0.0)
    } else {
        Err(Error::NegativeWceSquare { value: radicand })
    }
}

/// Worst-case error of an arbitrary weight vector on the given nodes, using
/// the cancellation-free regrouping described in the module docs. The kernel
/// values stream through one pair at a time; no Gram matrix is stored.
pub fn wce_general(spec: &KernelSpec, points: &PointSet, weights: &[f64]) -> Result<f64> {
    let n = points.len();
    if points.dimension() != spec.dimension() {
        return Err(Error::DimensionMismatch {
            context: "wce_general",
            expected: spec.dimension(),
            actual: points.dimension(),
        });
    }
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            context: "wce_general weights",
            expected: n,
            actual: weights.len(),
        });
    }
    let sigma = neumaier_sum(weights.iter().copied());
    let mut eval = Evaluator::new(spec);
    let mut quad = Accumulator::new();
    for k in 0..n {
        let xk = points.node(k);
        let wk = weights[k];
        quad.add(wk * wk * (eval.eval(xk, xk) - 1.0));
        for l in (k + 1)..n {
            quad.add(2.0 * wk * weights[l] * (eval.eval(xk, points.node(l)) - 1.0));
        }
    }
    let gap = 1.0 - sigma;
    sqrt_clamped(gap * gap + quad.value())
}

/// Worst-case error of the equal-weight rule. Shares the `wce_general` code
/// path so the two agree bit for bit at weights `1/n`.
pub fn wce_equal(spec: &KernelSpec, points: &PointSet) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::DomainTooSmall {
            op: "wce_equal",
            min: 1,
            n: 0,
        });
    }
    let weights = vec![1.0 / points.len() as f64; points.len()];
    wce_general(spec, points, &weights)
}

/// Worst-case error at the optimal weights, where the quadratic form
/// collapses to `e^2 = 1 - sum_k w_k`.
pub fn wce_optimal_from_weights(weights: &[f64]) -> Result<f64> {
    sqrt_clamped(1.0 - neumaier_sum(weights.iter().copied()))
}

/// Value of the weighted kernel interpolant `sum_k w_k K(x, t_k)` at `x`.
/// At the optimal weights this is the projection of the integration
/// representer (the constant 1) onto the span of the kernel sections.
pub fn interpolant_value(
    spec: &KernelSpec,
    points: &PointSet,
    weights: &[f64],
    x: &[f64],
) -> Result<f64> {
    if weights.len() != points.len() {
        return Err(Error::DimensionMismatch {
            context: "interpolant weights",
            expected: points.len(),
            actual: weights.len(),
        });
    }
    if x.len() != spec.dimension() || points.dimension() != spec.dimension() {
        return Err(Error::DimensionMismatch {
            context: "interpolant point",
            expected: spec.dimension(),
            actual: x.len(),
        });
    }
    let mut eval = Evaluator::new(spec);
    let mut acc = Accumulator::new();
    for (k, w) in weights.iter().enumerate() {
        acc.add(w * eval.eval(x, points.node(k)));
    }
    Ok(acc.value())
}

const GRAM_MAGIC: &[u8; 8] = b"LATCUBG1";
const WEIGHTS_MAGIC: &[u8; 8] = b"LATCUBW1";

/// Dump layout: 8-byte magic, u64 little-endian count, then little-endian
/// f64 payload (row-major `n * n` entries for Gram matrices, `n` entries for
/// weights).
pub fn write_gram_binary(path: &Path, gram: &GramMatrix) -> Result<()> {
    let n = gram.n();
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(GRAM_MAGIC)?;
    file.write_all(&(n as u64).to_le_bytes())?;
    for k in 0..n {
        for l in 0..n {
            file.write_all(&gram.matrix[(k, l)].to_le_bytes())?;
        }
    }
    file.flush()?;
    Ok(())
}

pub fn read_gram_binary(path: &Path) -> Result<GramMatrix> {
    let (n, data) = read_dump(path, GRAM_MAGIC, |n| n.checked_mul(n))?;
    Ok(GramMatrix {
        matrix: DMatrix::from_row_slice(n, n, &data),
    })
}

pub fn write_weights_binary(path: &Path, weights: &[f64]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(WEIGHTS_MAGIC)?;
    file.write_all(&(weights.len() as u64).to_le_bytes())?;
    for w in weights {
        file.write_all(&w.to_le_bytes())?;
    }
    file.flush()?;
    Ok(())
}

pub fn read_weights_binary(path: &Path) -> Result<Vec<f64>> {
    let (_, data) = read_dump(path, WEIGHTS_MAGIC, Some)?;
    Ok(data)
}

fn read_dump(
    path: &Path,
    magic: &[u8; 8],
    count: impl Fn(u64) -> Option<u64>,
) -> Result<(usize, Vec<f64>)> {
    let malformed = |reason: String| Error::MalformedDump {
        path: path.display().to_string(),
        reason,
    };
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut header = [0u8; 16];
    file.read_exact(&mut header)
        .map_err(|_| malformed("file shorter than its header".into()))?;
    if &header[..8] != magic {
        return Err(malformed(format!(
            "expected magic {:?}",
            std::str::from_utf8(magic).expect("magic is ASCII")
        )));
    }
    let n = u64::from_le_bytes(header[8..].try_into().expect("slice length is 8"));
    let entries = count(n)
        .filter(|&e| e <= (1 << 32))
        .ok_or_else(|| malformed(format!("implausible element count {n}")))?;
    let mut data = vec![0.0f64; entries as usize];
    let mut buf = [0u8; 8];
    for slot in &mut data {
        file.read_exact(&mut buf)
            .map_err(|_| malformed("payload shorter than declared".into()))?;
        *slot = f64::from_le_bytes(buf);
    }
    if file.read(&mut buf[..1])? != 0 {
        return Err(malformed("trailing bytes after payload".into()));
    }
    Ok((n as usize, data))
}

/// Text form: one weight per line, 17 significant digits, exact f64
/// round-trip.
pub fn write_weights_text(path: &Path, weights: &[f64]) -> Result<()> {
    let mut out = String::new();
    for w in weights {
        out.push_str(&crate::report::format_f64(*w));
        out.push('\n');
    }
    crate::report::write_atomic(path, out.as_bytes())
}

pub fn read_weights_text(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .map(|(idx, line)| {
            line.trim().parse::<f64>().map_err(|_| Error::MalformedDump {
                path: path.display().to_string(),
                reason: format!("line {} is not a number", idx + 1),
            })
        })
        .collect()
}
