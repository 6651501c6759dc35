//! Fitting κ in the error budget κ·T^(1/6+ε).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::experiments::direct_integrals;
use super::lab::Lab;
use crate::error::{Error, Result};

/// Calibration heights; none coincides with an acceptance window.
pub const CALIBRATION_HEIGHTS: [f64; 4] = [316_227.766_016_838, 562_341.325_190_349, 1_778_279.410_038_923, 3_162_277.660_168_379];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub branch: String,
    pub deviation: f64,
    pub scale: f64,
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub rows: Vec<CalibrationRow>,
    /// Largest |deviation| / T^(1/6+ε) over all rows.
    pub kappa: f64,
}

/// Deviations of both half-π mean values from ±(2/π)H at each height,
/// with the window length and ε of `cfg`.
pub fn calibrate(cfg: &ExperimentConfig, heights: &[f64]) -> Result<Calibration> {
    if heights.is_empty() {
        return Err(Error::Precondition("no calibration heights".into()));
    }
    let mut rows = Vec::new();
    for &t in heights {
        let c = ExperimentConfig {
            t,
            x: PI / 2.0,
            y: PI / 2.0,
            ..cfg.clone()
        };
        let lab = Lab::new(&c)?;
        let h = lab.h();
        let d = direct_integrals(&lab, c.x, c.y)?;
        let scale = t.powf(1.0 / 6.0 + c.epsilon);
        let pred = 2.0 / PI * h;
        for (branch, dev) in [("G1", d.i1.value - pred), ("G2", d.i2.value + pred)] {
            rows.push(CalibrationRow {
                t,
                h,
                branch: branch.to_string(),
                deviation: dev,
                scale,
                kappa: dev.abs() / scale,
            });
        }
    }
    let kappa = rows.iter().map(|r| r.kappa).fold(0.0, f64::max);
    Ok(Calibration { rows, kappa })
}
