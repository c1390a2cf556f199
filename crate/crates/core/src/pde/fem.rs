//! P1 Galerkin assembly and a conjugate-gradient solver for the diffusion
//! problem `-div(a grad u) = f` with homogeneous Dirichlet data.
//!
//! The diffusion coefficient and the source are both approximated by
//! one-point centroid quadrature per triangle; the P1 gradients are
//! integrated exactly. Everything is deterministic: assembly order, the
//! sparse layout, and the iteration sequence are fixed functions of the
//! input, so repeated runs produce bit-identical solutions.

use super::mesh::Mesh;
use crate::{Error, Result};

/// Compressed sparse row matrix over the interior nodes.
#[derive(Debug, Clone)]
pub(crate) struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Csr {
    /// Builds from unordered triplets, summing duplicates. Triplets are
    /// sorted first, so the layout does not depend on their arrival order.
    pub(crate) fn from_triplets(dim: usize, mut triplets: Vec<(u32, u32, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_counts = vec![0usize; dim + 1];
        let mut cols: Vec<u32> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("merge target exists") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_counts[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_counts[r + 1] += row_counts[r];
        }
        Csr {
            dim,
            row_ptr: row_counts,
            cols,
            vals,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.dim {
            let mut acc = 0.0;
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[idx] * x[self.cols[idx] as usize];
            }
            y[r] = acc;
        }
    }

    #[cfg(test)]
    pub(crate) fn entry(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        for idx in range {
            if self.cols[idx] as usize == c {
                return self.vals[idx];
            }
        }
        0.0
    }
}

/// Conjugate gradients for a symmetric positive-definite system, from a zero
/// initial guess, stopping at `|r|_2 <= tol * |b|_2`.
pub(crate) fn conjugate_gradient(a: &Csr, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let dim = a.dim();
    let bnorm2: f64 = b.iter().map(|v| v * v).sum();
    let mut x = vec![0.0; dim];
    if bnorm2 == 0.0 {
        return Ok(x);
    }
    let threshold2 = tol * tol * bnorm2;
    let mut r = b.to_vec();
    let mut p = b.to_vec();
    let mut ap = vec![0.0; dim];
    let mut rho: f64 = bnorm2;
    // CG reaches the exact solution in `dim` steps in exact arithmetic; the
    // cap leaves generous room for round-off stagnation before giving up.
    let max_iters = 10 * dim + 100;
    for _ in 0..max_iters {
        a.matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(pi, api)| pi * api).sum();
        if pap.is_nan() || pap <= 0.0 {
            return Err(Error::SolverBreakdown(format!(
                "conjugate gradient hit a non-positive curvature p'Ap = {pap:e}; \
                 the stiffness matrix is not positive definite"
            )));
        }
        let alpha = rho / pap;
        for i in 0..dim {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rho_next: f64 = r.iter().map(|v| v * v).sum();
        if rho_next <= threshold2 {
            return Ok(x);
        }
        let beta = rho_next / rho;
        rho = rho_next;
        for i in 0..dim {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::SolverBreakdown(format!(
        "conjugate gradient did not reach tolerance {tol:e} within {max_iters} iterations"
    )))
}

/// Assembles and solves the P1 system for a general coefficient and source,
/// both sampled at triangle centroids. Returns the full nodal vector with
/// zeros on the boundary.
///
/// The coefficient must be strictly positive; a nonpositive centroid value
/// is reported before it can poison the factorization.
pub fn solve_diffusion<A, F>(mesh: &Mesh, coeff: A, source: F, cg_tol: f64) -> Result<Vec<f64>>
where
    A: Fn(f64, f64) -> f64,
    F: Fn(f64, f64) -> f64,
{
    let dim = mesh.interior().len();
    let mut triplets: Vec<(u32, u32, f64)> = Vec::with_capacity(9 * mesh.triangles().len());
    let mut rhs = vec![0.0; dim];
    for tri in mesh.triangles() {
        let [cx, cy] = tri.centroid;
        let a_t = coeff(cx, cy);
        if !(a_t.is_finite() && a_t > 0.0) {
            return Err(Error::EllipticityViolation {
                value: a_t,
                x: cx,
                y: cy,
            });
        }
        let f_t = source(cx, cy) * tri.area / 3.0;
        let local: [Option<u32>; 3] = [
            mesh.interior_index(tri.vertices[0]).map(|i| i as u32),
            mesh.interior_index(tri.vertices[1]).map(|i| i as u32),
            mesh.interior_index(tri.vertices[2]).map(|i| i as u32),
        ];
        for (a, &ia) in local.iter().enumerate() {
            let Some(ia) = ia else { continue };
            rhs[ia as usize] += f_t;
            for (b, &ib) in local.iter().enumerate() {
                if let Some(ib) = ib {
                    triplets.push((ia, ib, a_t * tri.loc[a][b]));
                }
            }
        }
    }
    let matrix = Csr::from_triplets(dim, triplets);
    let interior_u = conjugate_gradient(&matrix, &rhs, cg_tol)?;
    let mut full = vec![0.0; mesh.num_nodes()];
    for (idx, &node) in mesh.interior().iter().enumerate() {
        full[node] = interior_u[idx];
    }
    Ok(full)
}
