use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Euler's constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub fn euler_constant() -> f64 {
    EULER_GAMMA
}

/// Logarithmic integral li(x), principal value, for x > 0 and x ≠ 1:
/// γ + ln|ln x| + Σ_{k≥1} (ln x)^k / (k·k!). li(1) = −∞ is a domain error.
pub fn li(x: f64) -> Result<f64> {
    if !(x > 0.0) || x == 1.0 || !x.is_finite() {
        return Err(Error::Domain {
            what: "li",
            value: x,
            domain: "x > 0, x != 1",
        });
    }
    let l = x.ln();
    let mut sum = CompensatedSum::new();
    sum.add(EULER_GAMMA);
    sum.add(l.abs().ln());
    let mut term = 1.0;
    for k in 1..400 {
        let kf = k as f64;
        term *= l / kf;
        let contrib = term / kf;
        sum.add(contrib);
        if contrib.abs() <= 1e-17 * sum.value().abs() && kf > l.abs() {
            break;
        }
    }
    Ok(sum.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // mpmath.li
        assert!((li(2.0).unwrap() - 1.045_163_780_117_492_8).abs() < 1e-15);
        assert!((li(1e6).unwrap() - 78_627.549_159_462_18).abs() < 1e-9);
        assert!((li(1e8).unwrap() - 5_762_209.375_448_031).abs() < 2e-8);
        // the zero of li
        assert!(li(1.451_369_234_883_381).unwrap().abs() < 1e-14);
        assert!(li(0.5).unwrap() < 0.0);
        assert!(li(1.0).is_err());
    }

    #[test]
    fn euler_constant_from_harmonic_numbers() {
        // H_n − ln(n + 1/2) = γ + O(1/n²)
        let n = 100_000_000u64;
        let mut s = CompensatedSum::new();
        for k in (1..=n).rev() {
            s.add(1.0 / k as f64);
        }
        let est = s.value() - (n as f64 + 0.5).ln();
        assert!((est - euler_constant()).abs() < 1e-8);
        assert!(euler_constant() > 0.5 && euler_constant() < 0.6);
        assert!((1.0 - euler_constant() - 0.422_784_335_098_467_1).abs() < 1e-15);
    }
}
