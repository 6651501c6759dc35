//! Accuracy audits of the Riemann–Siegel kernel against the
//! high-precision oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::power_law;
use crate::error::{Error, Result};
use crate::rs::{hardy_z, HiPrecOracle, RSConfig};

/// `n` points log-uniform in [lo, hi], sorted, from a seeded stream.
pub fn log_uniform_points(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..n).map(|_| (a + (b - a) * rng.random::<f64>()).exp()).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawAudit {
    /// (t, |Z_fast(t) − Z_oracle(t)|).
    pub errors: Vec<(f64, f64)>,
    /// (t at the bin maximum, bin maximum) per half decade.
    pub bins: Vec<(f64, f64)>,
    pub alpha: f64,
    pub constant: f64,
}

/// Fit the envelope of the kernel error to C·t^(−α) using the largest
/// error in each half-decade bin.
pub fn kernel_power_law(ts: &[f64], cfg: &RSConfig, oracle: &HiPrecOracle) -> Result<PowerLawAudit> {
    let errors: Vec<(f64, f64)> = ts
        .par_iter()
        .map(|&t| Ok((t, (hardy_z(t, cfg)? - oracle.hardy_z(t)?).abs())))
        .collect::<Result<_>>()?;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut key = None;
    for &(t, e) in &errors {
        let k = (2.0 * t.log10()).floor() as i64;
        if key != Some(k) {
            key = Some(k);
            bins.push((t, e));
        } else if let Some(last) = bins.last_mut() {
            if e > last.1 {
                *last = (t, e);
            }
        }
    }
    let (bt, be): (Vec<f64>, Vec<f64>) = bins.iter().copied().filter(|b| b.1 > 0.0).unzip();
    if bt.len() < 2 {
        return Err(Error::Precondition("power-law audit needs two nonzero bins".into()));
    }
    let (alpha, constant) = power_law(&bt, &be)?;
    Ok(PowerLawAudit {
        errors,
        bins,
        alpha,
        constant,
    })
}

/// Largest relative difference between |Z(t)| from the fast path and
/// |ζ(1/2 + it)| from the oracle's Euler–Maclaurin sum.
pub fn zeta_modulus_match(ts: &[f64], cfg: &RSConfig, oracle: &HiPrecOracle) -> Result<f64> {
    let rel: Vec<f64> = ts
        .par_iter()
        .map(|&t| {
            let z = hardy_z(t, cfg)?.abs();
            let zeta = oracle.zeta_abs(t)?;
            Ok((z - zeta).abs() / zeta)
        })
        .collect::<Result<_>>()?;
    Ok(rel.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_points() {
        let a = log_uniform_points(7, 50, 1e3, 1e5);
        assert_eq!(a, log_uniform_points(7, 50, 1e3, 1e5));
        assert_ne!(a, log_uniform_points(8, 50, 1e3, 1e5));
        assert!(a.iter().all(|&t| (1e3..=1e5).contains(&t)));
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
    }
}
