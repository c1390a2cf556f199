//! Library surface of the `latcub` command-line harness: config resolution
//! and study runners, kept callable for integration tests.

pub mod config;
pub mod runs;

pub use config::{OnedSettings, PdeUqSettings, Profile, RawConfig, Wce2dSettings};
pub use runs::{
    build_points, run_oned_study, run_pde_uq_study, run_wce, run_wce2d_study, run_weights,
    PointRequest, StudyOutputs, EMBEDDED_GV_UQ, EMBEDDED_GV_WCE2D,
};
