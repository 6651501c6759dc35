use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the range where the fast kernels are validated.
pub const T_UPPER: f64 = 1e8;
pub const T_LOWER: f64 = 1e3;
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Window [T, T + H] with H = T^(1/6 + 2ε) unless overridden.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow", into = "RawWindow")]
pub struct WindowSpec {
    t: f64,
    epsilon: f64,
    h_override: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct RawWindow {
    #[serde(rename = "T")]
    t: f64,
    epsilon: f64,
    #[serde(rename = "H_override", default)]
    h_override: Option<f64>,
}

impl TryFrom<RawWindow> for WindowSpec {
    type Error = Error;
    fn try_from(r: RawWindow) -> Result<Self> {
        WindowSpec::new(r.t, r.epsilon, r.h_override)
    }
}

impl From<WindowSpec> for RawWindow {
    fn from(w: WindowSpec) -> Self {
        RawWindow {
            t: w.t,
            epsilon: w.epsilon,
            h_override: w.h_override,
        }
    }
}

impl WindowSpec {
    pub fn new(t: f64, epsilon: f64, h_override: Option<f64>) -> Result<Self> {
        if !(t >= T_LOWER) || !t.is_finite() {
            return Err(Error::Config(format!("T = {t} must be at least {T_LOWER}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0 / 12.0) {
            return Err(Error::Config(format!("epsilon = {epsilon} must lie in (0, 1/12)")));
        }
        if let Some(h) = h_override {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::Config(format!("H override {h} must be positive")));
            }
        }
        let w = Self {
            t,
            epsilon,
            h_override,
        };
        if !(w.t + w.h() < T_UPPER) {
            return Err(Error::Config(format!(
                "window end T + H = {} exceeds {T_UPPER:e}",
                w.t + w.h()
            )));
        }
        Ok(w)
    }

    pub fn with_h(t: f64, h: f64) -> Result<Self> {
        Self::new(t, DEFAULT_EPSILON, Some(h))
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn h_override(&self) -> Option<f64> {
        self.h_override
    }

    /// T^(1/6 + 2ε).
    pub fn natural_h(&self) -> f64 {
        self.t.powf(1.0 / 6.0 + 2.0 * self.epsilon)
    }

    pub fn h(&self) -> f64 {
        self.h_override.unwrap_or_else(|| self.natural_h())
    }

    pub fn end(&self) -> f64 {
        self.t + self.h()
    }

    /// True when H exceeds the natural window length.
    pub fn is_enlarged(&self) -> bool {
        self.h() > self.natural_h() * (1.0 + 1e-12)
    }
}
