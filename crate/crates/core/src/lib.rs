//! Kernel cubature over rank-1 lattice point sets.
//!
//! This crate computes cubature rules for integration over the unit cube
//! `[0,1]^s` against the uniform measure. The nodes come from (optionally
//! shifted and tent-transformed) rank-1 lattices; the weights are either the
//! classical equal weights `1/n` or the optimal weights of a reproducing
//! kernel Hilbert space, obtained by solving the kernel Gram system
//! `K w = 1`. The spaces are weighted Sobolev spaces of dominating mixed
//! smoothness `alpha` in 1..=4, with product or product-and-order-dependent
//! (POD) coordinate weights, whose reproducing kernels are built from
//! Bernoulli polynomials.
//!
//! The crate exposes:
//!
//! - [`points`]: generating vectors, lattice construction, random shifts and
//!   the tent (baker's) transform;
//! - [`kernel`]: Bernoulli polynomials and kernel evaluation for both weight
//!   schemes;
//! - [`cubature`]: Gram assembly, the optimal-weight solve, worst-case
//!   errors, and binary/text exports;
//! - [`analytic1d`]: closed forms for the one-dimensional rule on left
//!   Riemann points, used as oracles for the generic machinery;
//! - [`pde`]: a P1 finite element solver for a diffusion problem with an
//!   `s`-dimensional random coefficient and the cubature-driven uncertainty
//!   quantification experiment around it;
//! - [`studies`]: the reference experiments (1D rate doubling, tent-transform
//!   worst-case error study) and deterministic table emission;
//! - [`rates`]: log-log least-squares convergence rate fits.
//!
//! All randomness flows through explicit integer seeds and the portable
//! ChaCha8 generator, so every result in this crate is reproducible bit for
//! bit from its inputs.

// Pair sums over k < l, CSR row pointers, and bitmask subset walks keep the
// index as the semantic object; iterator rewrites would obscure the math.
#![allow(clippy::needless_range_loop)]

pub mod analytic1d;
pub mod cubature;
mod error;
pub mod kernel;
pub mod pde;
pub mod points;
pub mod rates;
pub mod report;
pub mod studies;
mod sum;

pub use error::{Error, Result};
pub use sum::{neumaier_sum, Accumulator};
