//! Computable models of the ladder φ₁, its inversion, prime counting and
//! the separation of a window from its mirror image.

pub mod asymptotic;
pub mod li;
pub mod mirror;
pub mod ode;
pub mod primes;
pub mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use asymptotic::{ladder_asymptotic, AsymptoticLadder};
pub use li::{euler_constant, li, EULER_GAMMA};
pub use mirror::{mirror_collection, mirror_point, separation_rho, IdentityLadder, Separation};
pub use ode::{ladder_ode, OdeLadder, OdeSpec};
pub use primes::{pi_count, PrimeCounter, PrimeMethod};
pub use table::TabulatedLadder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderKind {
    Asymptotic,
    Ode,
    Tabulated,
    Identity,
}

impl LadderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LadderKind::Asymptotic => "asymptotic",
            LadderKind::Ode => "ode",
            LadderKind::Tabulated => "tabulated",
            LadderKind::Identity => "identity",
        }
    }
}

impl fmt::Display for LadderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LadderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymptotic" => Ok(LadderKind::Asymptotic),
            "ode" => Ok(LadderKind::Ode),
            "tabulated" => Ok(LadderKind::Tabulated),
            "identity" => Ok(LadderKind::Identity),
            _ => Err(Error::Parse(format!("unknown ladder kind {s:?}"))),
        }
    }
}

/// An increasing model of φ₁ on a working range.
pub trait LadderModel: Send + Sync {
    fn kind(&self) -> LadderKind;

    fn range(&self) -> (f64, f64);

    fn eval(&self, t: f64) -> Result<f64>;

    fn deriv(&self, t: f64) -> Result<f64>;

    /// Derivative of `eval` as implemented. Differs from `deriv` only by the
    /// model's discretisation error; inversion uses it for Newton steps.
    fn slope(&self, t: f64) -> Result<f64> {
        self.deriv(t)
    }

    /// (t₀, φ₁(t₀)) for anchored models.
    fn anchor(&self) -> Option<(f64, f64)> {
        None
    }

    fn image(&self) -> Result<(f64, f64)> {
        let (a, b) = self.range();
        Ok((self.eval(a)?, self.eval(b)?))
    }
}

pub(crate) fn check_range(t: f64, range: (f64, f64), what: &'static str) -> Result<()> {
    if !(t >= range.0 && t <= range.1) {
        return Err(Error::Domain {
            what,
            value: t,
            domain: "ladder range",
        });
    }
    Ok(())
}
