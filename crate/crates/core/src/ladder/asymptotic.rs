use super::li::{li, EULER_GAMMA};
use super::{check_range, LadderKind, LadderModel};
use crate::error::{Error, Result};

/// φ₁(t) = t − (1 − γ)·li(t), the smooth form of t − φ₁(t) ~ (1 − γ)π(t).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticLadder {
    range: (f64, f64),
}

pub const ASYMPTOTIC_MIN_T: f64 = 10.0;

pub fn ladder_asymptotic(range: (f64, f64)) -> Result<AsymptoticLadder> {
    if !(range.0 >= ASYMPTOTIC_MIN_T && range.0 < range.1) || !range.1.is_finite() {
        return Err(Error::Config(format!(
            "asymptotic ladder range {range:?} must satisfy {ASYMPTOTIC_MIN_T} <= lo < hi"
        )));
    }
    Ok(AsymptoticLadder { range })
}

impl LadderModel for AsymptoticLadder {
    fn kind(&self) -> LadderKind {
        LadderKind::Asymptotic
    }

    fn range(&self) -> (f64, f64) {
        self.range
    }

    fn eval(&self, t: f64) -> Result<f64> {
        check_range(t, self.range, "asymptotic ladder")?;
        Ok(t - (1.0 - EULER_GAMMA) * li(t)?)
    }

    fn deriv(&self, t: f64) -> Result<f64> {
        check_range(t, self.range, "asymptotic ladder")?;
        Ok(1.0 - (1.0 - EULER_GAMMA) / t.ln())
    }
}
