//! The Riemann–Siegel theta function by its asymptotic expansion
//!
//! θ(t) = (t/2)·ln(t/2π) − t/2 − π/8 + 1/(48t) + 7/(5760t³) + 31/(80640t⁵) + …
//!
//! The main part is evaluated in double-double so that θ(t) keeps an
//! absolute accuracy near 1e-15 up to t ≈ 1e8, where θ itself is ~1e8.

use serde::{Deserialize, Serialize};

use crate::dd::{Dd, LN_2PI, PI_8};
use crate::error::{Error, Result};

/// Largest supported number of correction terms beyond the three main terms.
pub const THETA_MAX_ORDER: u8 = 3;

/// Coefficients of t^-(2k+1): (1 − 2^(1−2k))·|B_2k| / (4k(2k−1)), k = 1..=5.
const CORRECTIONS: [f64; 5] = [
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    // first omitted term, only used for the error bound
    511.0 / 512.0 * (5.0 / 66.0) / 180.0,
];

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// How many correction terms of the asymptotic series to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ThetaExpansion {
    order: u8,
}

impl ThetaExpansion {
    pub fn new(order: u8) -> Result<Self> {
        if order > THETA_MAX_ORDER {
            return Err(Error::Config(format!(
                "theta expansion order {order} exceeds maximum {THETA_MAX_ORDER}"
            )));
        }
        Ok(Self { order })
    }

    pub const fn full() -> Self {
        Self {
            order: THETA_MAX_ORDER,
        }
    }

    pub fn order(self) -> u8 {
        self.order
    }

    /// Documented absolute error bound for `t > 2π`: twice the first omitted
    /// term. For order 0 this is `C/t` with `C = 1/24`.
    pub fn error_bound(self, t: f64) -> f64 {
        let k = self.order as i32;
        2.0 * CORRECTIONS[self.order as usize] / t.powi(2 * k + 1)
    }
}

impl Default for ThetaExpansion {
    fn default() -> Self {
        Self::full()
    }
}

impl TryFrom<u8> for ThetaExpansion {
    type Error = Error;
    fn try_from(order: u8) -> Result<Self> {
        Self::new(order)
    }
}

impl From<ThetaExpansion> for u8 {
    fn from(e: ThetaExpansion) -> u8 {
        e.order
    }
}

fn check_domain(t: f64, what: &'static str) -> Result<()> {
    if !(t > TWO_PI) || !t.is_finite() {
        return Err(Error::Domain {
            what,
            value: t,
            domain: "t > 2π",
        });
    }
    Ok(())
}

/// θ(t) in double-double. Callers must have checked the domain.
pub(crate) fn theta_dd(t: f64, exp: ThetaExpansion) -> Dd {
    let log_ratio = Dd::from_f64(t).ln() - LN_2PI;
    let main = log_ratio.mul_f64(0.5 * t).add_f64(-0.5 * t) - PI_8;
    if exp.order == 0 {
        return main;
    }
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    for k in (0..exp.order as usize).rev() {
        corr = corr * inv2 + CORRECTIONS[k];
    }
    main.add_f64(corr * inv)
}

/// Riemann–Siegel theta function for `t > 2π`.
pub fn theta(t: f64, exp: ThetaExpansion) -> Result<f64> {
    check_domain(t, "theta")?;
    Ok(theta_dd(t, exp).to_f64())
}

pub(crate) fn theta_deriv_unchecked(t: f64) -> f64 {
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    // d/dt c_k t^-(2k+1) = -(2k+1) c_k t^-(2k+2)
    let mut corr = 0.0;
    for k in (0..THETA_MAX_ORDER as usize).rev() {
        corr = corr * inv2 - (2 * k + 1) as f64 * CORRECTIONS[k];
    }
    0.5 * (t / TWO_PI).ln() + corr * inv2
}

/// θ'(t) with all correction terms; strictly positive for `t > 2π`.
pub fn theta_deriv(t: f64) -> Result<f64> {
    check_domain(t, "theta_deriv")?;
    Ok(theta_deriv_unchecked(t))
}
