//! Experiment runner: configuration, the verification program, report
//! files and calibration.

pub mod calibrate;
pub mod config;
pub mod experiments;
pub mod kernel;
pub mod lab;
pub mod report;
pub mod stats;

pub use calibrate::{calibrate, Calibration, CalibrationRow, CALIBRATION_HEIGHTS};
pub use config::{ExperimentConfig, DEFAULT_KAPPA};
pub use experiments::{
    area_trend, default_x_grid, integrate_sets, ladder_checks, scan_shape, separation_series, theorem_trend,
    verify_corollaries, verify_sign_area, verify_theorem,
};
pub use lab::Lab;
pub use report::{Check, Relation, Verdict, VerificationReport, SCHEMA_VERSION};
