//! Hardy's Z(t) by the Riemann–Siegel formula
//!
//!   Z(t) = 2 Σ_{n≤N} n^(-1/2) cos(θ(t) − t ln n)
//!        + (−1)^(N−1) (2π/t)^(1/4) Σ_k C_k(p − 1/2) (2π/t)^(k/2)
//!
//! with N = ⌊√(t/2π)⌋ and p the fractional part of √(t/2π). θ(t) comes
//! from the double-double expansion and t·ln n is split exactly before
//! reduction modulo 2π, so each oscillator keeps an absolute error near
//! 1e-16 even at t ≈ 1e8.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::coeffs::remainder_coeff;
use super::theta::{theta_dd, ThetaExpansion};
use crate::dd::{reduce_two_pi, two_prod, Dd, TWO_PI as TWO_PI_DD};
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Smallest t accepted by the fast path.
pub const T_MIN: f64 = 100.0;

/// Largest supported number of remainder terms (C0 through C4).
pub const MAX_CORRECTION_TERMS: u8 = 5;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const INV_TWO_PI: f64 = 1.0 / TWO_PI;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Entries of the oscillator table; enough for t up to 2π·4096² ≈ 1.05e8.
const LN_TABLE_LEN: usize = 4097;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummationMode {
    Plain,
    #[default]
    Compensated,
}

/// Riemann–Siegel configuration. `correction_terms = m` keeps C0..C(m−1);
/// the truncation error is then of order t^(−(2m+1)/4).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RSConfig {
    pub correction_terms: u8,
    pub summation_mode: SummationMode,
}

impl RSConfig {
    pub fn new(correction_terms: u8, summation_mode: SummationMode) -> Result<Self> {
        let cfg = Self {
            correction_terms,
            summation_mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.correction_terms > MAX_CORRECTION_TERMS {
            return Err(Error::Config(format!(
                "correction_terms = {} exceeds maximum {MAX_CORRECTION_TERMS}",
                self.correction_terms
            )));
        }
        Ok(())
    }
}

impl Default for RSConfig {
    fn default() -> Self {
        Self {
            correction_terms: MAX_CORRECTION_TERMS,
            summation_mode: SummationMode::Compensated,
        }
    }
}

/// Normalisation of Z² in Z̃².
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LnFactorMode {
    /// Z(t)² / ln t.
    #[default]
    Plain,
    /// Z(t)² / (ln(t/2π) + 2γ), which has window mean 1 asymptotically.
    MeanNormalized,
}

/// (ln n as hi + lo, n^(-1/2)) for small n.
#[derive(Clone, Copy)]
struct Oscillator {
    ln_hi: f64,
    ln_lo: f64,
    rsqrt: f64,
}

impl Oscillator {
    fn new(n: usize) -> Self {
        let l = Dd::from_f64(n as f64).ln();
        Oscillator {
            ln_hi: l.hi,
            ln_lo: l.lo,
            rsqrt: 1.0 / (n as f64).sqrt(),
        }
    }
}

fn oscillators() -> &'static [Oscillator] {
    static TABLE: OnceLock<Vec<Oscillator>> = OnceLock::new();
    TABLE.get_or_init(|| (0..LN_TABLE_LEN).map(|n| Oscillator::new(n.max(1))).collect())
}

/// cos(θ − t ln n)/√n with θ already reduced to [−π, π].
#[inline]
fn oscillator_term(t: f64, th: Dd, osc: Oscillator) -> f64 {
    // t ln n = p + e exactly up to ~1e-24
    let (p, e) = two_prod(t, osc.ln_hi);
    let e = t.mul_add(osc.ln_lo, e);
    let k = (p * INV_TWO_PI).round();
    let (q, f) = two_prod(k, TWO_PI_DD.hi);
    // p − q is exact; the small parts are each below ~1e-7
    let low = e - f - k * TWO_PI_DD.lo;
    let phase = (th.hi - (p - q)) + (th.lo - low);
    phase.cos() * osc.rsqrt
}

fn check_domain(t: f64, what: &'static str) -> Result<()> {
    if !(t >= T_MIN) || !t.is_finite() {
        return Err(Error::Domain {
            what,
            value: t,
            domain: "t >= 100",
        });
    }
    Ok(())
}

/// Z(t) without the domain check.
pub(crate) fn hardy_z_unchecked(t: f64, cfg: &RSConfig) -> f64 {
    let a = (t / TWO_PI).sqrt();
    let n_terms = a.floor() as usize;
    let th = reduce_two_pi(theta_dd(t, ThetaExpansion::full()));

    let table = oscillators();
    let term = |n: usize| -> f64 {
        let osc = if n < table.len() {
            table[n]
        } else {
            Oscillator::new(n)
        };
        oscillator_term(t, th, osc)
    };
    let main = match cfg.summation_mode {
        SummationMode::Plain => (1..=n_terms).map(term).sum::<f64>(),
        SummationMode::Compensated => (1..=n_terms).map(term).collect::<CompensatedSum>().value(),
    };

    let m = cfg.correction_terms as usize;
    if m == 0 {
        return 2.0 * main;
    }
    let z = (a - n_terms as f64) - 0.5;
    let r = (TWO_PI / t).sqrt();
    let mut rem = 0.0;
    for k in (0..m).rev() {
        rem = rem * r + remainder_coeff(k, z);
    }
    let sign = if n_terms % 2 == 1 { 1.0 } else { -1.0 };
    2.0 * main + sign * r.sqrt() * rem
}

/// Hardy's Z(t) for `t >= 100`.
pub fn hardy_z(t: f64, cfg: &RSConfig) -> Result<f64> {
    check_domain(t, "hardy_z")?;
    cfg.validate()?;
    Ok(hardy_z_unchecked(t, cfg))
}

#[inline]
pub(crate) fn ln_factor(t: f64, mode: LnFactorMode) -> f64 {
    match mode {
        LnFactorMode::Plain => t.ln(),
        LnFactorMode::MeanNormalized => (t / TWO_PI).ln() + 2.0 * EULER_GAMMA,
    }
}

pub(crate) fn z_tilde_sq_unchecked(t: f64, mode: LnFactorMode, cfg: &RSConfig) -> f64 {
    let z = hardy_z_unchecked(t, cfg);
    z * z / ln_factor(t, mode)
}

/// Z̃²(t) with the default Riemann–Siegel configuration.
pub fn z_tilde_sq(t: f64, mode: LnFactorMode) -> Result<f64> {
    z_tilde_sq_with(t, mode, &RSConfig::default())
}

pub fn z_tilde_sq_with(t: f64, mode: LnFactorMode, cfg: &RSConfig) -> Result<f64> {
    check_domain(t, "z_tilde_sq")?;
    cfg.validate()?;
    Ok(z_tilde_sq_unchecked(t, mode, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_and_config_checks() {
        let cfg = RSConfig::default();
        assert!(matches!(hardy_z(99.9, &cfg), Err(Error::Domain { .. })));
        assert!(hardy_z(f64::INFINITY, &cfg).is_err());
        assert!(RSConfig::new(6, SummationMode::Plain).is_err());
        assert!(z_tilde_sq(50.0, LnFactorMode::Plain).is_err());
    }

    #[test]
    fn value_at_ten_thousand() {
        // mpmath.siegelz(10000)
        let z = hardy_z(1e4, &RSConfig::default()).unwrap();
        assert!((z - (-0.341_394_724_231_208_56)).abs() < 1e-11, "{z}");
    }

    #[test]
    fn bit_identical_reruns() {
        let cfg = RSConfig::default();
        for &t in &[123.4, 5.5e4, 7.77e6] {
            assert_eq!(
                hardy_z(t, &cfg).unwrap().to_bits(),
                hardy_z(t, &cfg).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn summation_modes_agree() {
        let plain = RSConfig::new(5, SummationMode::Plain).unwrap();
        let comp = RSConfig::default();
        for &t in &[1e3, 2.5e5, 9e7] {
            let a = hardy_z(t, &plain).unwrap();
            let b = hardy_z(t, &comp).unwrap();
            assert!((a - b).abs() < 1e-11, "t={t}");
        }
    }

    #[test]
    fn z_tilde_sq_is_nonnegative() {
        let mut t = 100.0;
        while t < 2e3 {
            assert!(z_tilde_sq(t, LnFactorMode::Plain).unwrap() >= 0.0);
            assert!(z_tilde_sq(t, LnFactorMode::MeanNormalized).unwrap() >= 0.0);
            t += 0.37;
        }
    }
}
