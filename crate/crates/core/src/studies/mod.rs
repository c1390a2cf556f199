//! Self-contained experiment drivers behind the command-line studies.

pub mod oned;
pub mod wce2d;

pub use oned::{run_oned, Integrand, OnedReport, OnedRow};
pub use wce2d::{run_wce2d, Wce2dReport, Wce2dRow};
