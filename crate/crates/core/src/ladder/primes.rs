//! Prime counting by an odd-only sieve, or by li(t).

use serde::{Deserialize, Serialize};

use super::li::li;
use crate::error::{Error, Result};

/// Largest sieve the counter will build.
pub const MAX_SIEVE_LIMIT: u64 = 2_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimeMethod {
    /// Exact count for t up to the limit.
    Sieve,
    /// round(li(t)). Off by less than √t·ln t/(8π) for t ≥ 2657 if the
    /// Riemann hypothesis holds (Schoenfeld's bound).
    LiApprox,
}

#[derive(Clone, Debug)]
pub struct PrimeCounter {
    limit: u64,
    method: PrimeMethod,
    /// bit j of the odd sieve stands for 2j + 1
    bits: Vec<u64>,
    /// odd primes in words before index w
    prefix: Vec<u32>,
}

impl PrimeCounter {
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::LimitExceeded {
                what: "prime sieve",
                requested: limit as f64,
                limit: MAX_SIEVE_LIMIT as f64,
            });
        }
        let n_odd = (limit / 2 + 1) as usize;
        let words = n_odd.div_ceil(64);
        let mut bits = vec![u64::MAX; words];
        // 1 is not prime; bits past the limit are cleared
        bits[0] &= !1;
        for j in n_odd..words * 64 {
            bits[j / 64] &= !(1u64 << (j % 64));
        }
        let mut j = 1usize;
        loop {
            let p = 2 * j + 1;
            if p * p > limit as usize {
                break;
            }
            if bits[j / 64] >> (j % 64) & 1 == 1 {
                // odd multiples of p from p²
                let mut k = (p * p - 1) / 2;
                while k < n_odd {
                    bits[k / 64] &= !(1u64 << (k % 64));
                    k += p;
                }
            }
            j += 1;
        }
        let mut prefix = Vec::with_capacity(words + 1);
        let mut acc = 0u32;
        for w in &bits {
            prefix.push(acc);
            acc += w.count_ones();
        }
        prefix.push(acc);
        Ok(Self {
            limit,
            method: PrimeMethod::Sieve,
            bits,
            prefix,
        })
    }

    pub fn li_approx() -> Self {
        Self {
            limit: u64::MAX,
            method: PrimeMethod::LiApprox,
            bits: Vec::new(),
            prefix: Vec::new(),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn method(&self) -> PrimeMethod {
        self.method
    }

    /// π(t), the number of primes ≤ t.
    pub fn count(&self, t: f64) -> Result<u64> {
        if t.is_nan() {
            return Err(Error::Domain {
                what: "pi_count",
                value: t,
                domain: "real t",
            });
        }
        if t < 2.0 {
            return Ok(0);
        }
        match self.method {
            PrimeMethod::LiApprox => Ok(li(t)?.round() as u64),
            PrimeMethod::Sieve => {
                if t > self.limit as f64 {
                    return Err(Error::LimitExceeded {
                        what: "pi_count",
                        requested: t,
                        limit: self.limit as f64,
                    });
                }
                let n = t.floor() as u64;
                // odd numbers 2j+1 ≤ n have j ≤ (n−1)/2
                let j = ((n - 1) / 2) as usize;
                let w = j / 64;
                let b = j % 64;
                let mask = if b == 63 { u64::MAX } else { (1u64 << (b + 1)) - 1 };
                let odd = self.prefix[w] as u64 + (self.bits[w] & mask).count_ones() as u64;
                Ok(odd + 1)
            }
        }
    }
}

pub fn pi_count(t: f64, pc: &PrimeCounter) -> Result<u64> {
    pc.count(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_count(n: u64) -> u64 {
        (2..=n)
            .filter(|&k| (2..).take_while(|d| d * d <= k).all(|d| k % d != 0))
            .count() as u64
    }

    #[test]
    fn small_values() {
        let pc = PrimeCounter::sieve(1000).unwrap();
        assert_eq!(pc.count(1.9).unwrap(), 0);
        assert_eq!(pc.count(2.0).unwrap(), 1);
        assert_eq!(pc.count(10.0).unwrap(), 4);
        assert_eq!(pc.count(10.99).unwrap(), 4);
        assert_eq!(pc.count(127.0).unwrap(), 31);
        assert_eq!(pc.count(1000.0).unwrap(), 168);
        assert!(matches!(pc.count(1000.5), Err(Error::LimitExceeded { .. })));
    }

    #[test]
    fn one_million() {
        let pc = PrimeCounter::sieve(1_000_000).unwrap();
        assert_eq!(pc.count(1e6).unwrap(), 78498);
    }

    #[test]
    fn matches_trial_division_to_ten_thousand() {
        let pc = PrimeCounter::sieve(10_000).unwrap();
        let mut expect = 0;
        let mut prev = 1;
        for n in (2..=10_000u64).step_by(37) {
            expect += trial_division_count(n) - trial_division_count(prev);
            prev = n;
            assert_eq!(pc.count(n as f64).unwrap(), expect, "n={n}");
        }
    }

    #[test]
    fn li_mode_within_error_model() {
        let pc = PrimeCounter::li_approx();
        let t = 1e6f64;
        let bound = t.sqrt() * t.ln() / (8.0 * std::f64::consts::PI);
        let approx = pc.count(t).unwrap() as f64;
        assert!((approx - 78498.0).abs() < bound);
    }
}
