//! Independent reference evaluator for Z(t).
//!
//! ζ(1/2 + it) is summed by Euler–Maclaurin and θ(t) is taken from the
//! exact log-Gamma form Im lnΓ(1/4 + it/2) − (t/2) ln π, both in MPFR.
//! Nothing here shares code with the Riemann–Siegel path.
//!
//! For `working_digits <= 30` the main Dirichlet sum runs in double-double
//! and uses multiplicativity: n^(−s) = p^(−s)·m^(−s) for n = p·m with p the
//! smallest prime factor, so only primes need a phase. Prime logarithms
//! come from MPFR as three doubles and the phases t·ln p are reduced
//! modulo 2π with a three-part 2π. The accumulated error stays near 1e-27
//! for t ≤ 1e7. Above 30 digits every term is computed in MPFR.

use std::sync::OnceLock;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::dd::{quick_two_sum, two_prod, Dd, TWO_PI, TWO_PI_TAIL};
use crate::error::{precondition, Error, Result};

const DEFAULT_T_MAX: f64 = 1e7;
const DD_DIGITS: u32 = 30;
const MAX_TAIL_TERMS: usize = 600;

/// High-precision reference evaluator. Tables are built on first use and
/// are read-only afterwards, so one oracle may be shared across threads.
#[derive(Debug)]
pub struct HiPrecOracle {
    working_digits: u32,
    t_max: f64,
    tables: OnceLock<DdTables>,
}

#[derive(Debug)]
struct DdTables {
    /// smallest prime factor of n; `spf[n] == n` for primes
    spf: Vec<u32>,
    primes: Vec<PrimeData>,
}

#[derive(Debug, Clone, Copy)]
struct PrimeData {
    ln: [f64; 3],
    rsqrt: Dd,
}

/// Complex number over MPFR floats.
#[derive(Clone, Debug)]
struct Cx {
    re: Float,
    im: Float,
}

impl Cx {
    fn new(prec: u32, re: f64, im: f64) -> Self {
        Cx {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    fn mul(&self, o: &Cx) -> Cx {
        let p = self.re.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Cx { re, im }
    }

    fn scale(&self, s: &Float) -> Cx {
        let p = self.re.prec();
        Cx {
            re: Float::with_val(p, &self.re * s),
            im: Float::with_val(p, &self.im * s),
        }
    }

    fn add(&self, o: &Cx) -> Cx {
        let p = self.re.prec();
        Cx {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }

    fn recip(&self) -> Cx {
        let p = self.re.prec();
        let n = self.norm_sq();
        Cx {
            re: Float::with_val(p, &self.re / &n),
            im: -Float::with_val(p, &self.im / &n),
        }
    }

    fn norm_sq(&self) -> Float {
        let p = self.re.prec();
        Float::with_val(p, self.re.clone().square() + self.im.clone().square())
    }

    fn abs_f64(&self) -> f64 {
        self.norm_sq().sqrt().to_f64()
    }
}

impl HiPrecOracle {
    pub fn new(working_digits: u32) -> Result<Self> {
        if working_digits < 30 {
            return Err(Error::Config(format!(
                "oracle working_digits must be at least 30, got {working_digits}"
            )));
        }
        Ok(Self {
            working_digits,
            t_max: DEFAULT_T_MAX,
            tables: OnceLock::new(),
        })
    }

    /// Raise or lower the largest t the double-double tables cover.
    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn working_digits(&self) -> u32 {
        self.working_digits
    }

    fn prec_bits(&self, t: f64) -> u32 {
        let digits_bits = (self.working_digits as f64 * std::f64::consts::LOG2_10).ceil() as u32;
        digits_bits + 24 + t.max(2.0).log2().ceil() as u32
    }

    fn eps(&self) -> f64 {
        10f64.powi(-(self.working_digits as i32 + 3))
    }

    fn em_cutoff(t: f64) -> usize {
        ((1.25 * t / (2.0 * std::f64::consts::PI)).ceil() as usize).max(100) + 10
    }

    /// Exact θ(t) = Im lnΓ(1/4 + it/2) − (t/2) ln π at full working precision.
    pub fn theta_big(&self, t: f64) -> Result<Float> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "oracle theta",
                value: t,
                domain: "t > 0",
            });
        }
        let prec = self.prec_bits(t);
        let y = Float::with_val(prec, t) / 2u32;
        let min_abs = 40f64.max(2.0 * self.working_digits as f64);
        let shift = if t / 2.0 >= min_abs {
            0
        } else {
            (min_abs - t / 2.0).ceil() as u32
        };
        // Im ln Γ(z) = Im ln Γ(z + K) − Σ_{j<K} arg(z + j)
        let mut shift_sum = Float::new(prec);
        for j in 0..shift {
            let x = Float::with_val(prec, 0.25) + j;
            shift_sum += Float::with_val(prec, y.atan2_ref(&x));
        }
        let wre = Float::with_val(prec, 0.25) + shift;
        let w = Cx {
            re: wre.clone(),
            im: y.clone(),
        };
        let arg = Float::with_val(prec, y.atan2_ref(&wre));
        let ln_abs = w.norm_sq().ln() / 2u32;
        // Im[(w − 1/2) ln w − w]
        let mut im = Float::with_val(prec, &wre - 0.5) * &arg + Float::with_val(prec, &y * &ln_abs) - &y;
        // Stirling series Σ B_2k / (2k(2k−1) w^(2k−1))
        let winv = w.recip();
        let winv2 = winv.mul(&winv);
        let mut wpow = winv;
        let eps = Float::with_val(prec, self.eps()) * Float::with_val(prec, &y + 1u32);
        let mut converged = false;
        for k in 1..200u32 {
            let coeff = stirling_coeff(prec, k);
            let term = Float::with_val(prec, &wpow.im * &coeff);
            let small = Float::with_val(prec, term.abs_ref()) < eps;
            im += term;
            if small {
                converged = true;
                break;
            }
            wpow = wpow.mul(&winv2);
        }
        if !converged {
            return Err(Error::Precision(format!("Stirling series did not converge at t = {t}")));
        }
        let ln_pi = Float::with_val(prec, Constant::Pi).ln();
        Ok(im - shift_sum - y * ln_pi)
    }

    pub fn theta(&self, t: f64) -> Result<f64> {
        Ok(self.theta_big(t)?.to_f64())
    }

    /// ζ(1/2 + it) as (re, im) at working precision.
    pub fn zeta_critical_big(&self, t: f64) -> Result<(Float, Float)> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "oracle zeta",
                value: t,
                domain: "t > 0",
            });
        }
        let prec = self.prec_bits(t);
        let n = Self::em_cutoff(t);
        let main = if self.working_digits <= DD_DIGITS && t <= self.t_max {
            let (re, im) = self.main_sum_dd(t, n);
            Cx {
                re: Float::with_val(prec, re.hi) + re.lo,
                im: Float::with_val(prec, im.hi) + im.lo,
            }
        } else {
            main_sum_mpfr(prec, t, n)
        };
        let tail = self.em_tail(prec, t, n)?;
        let z = main.add(&tail);
        Ok((z.re, z.im))
    }

    pub fn zeta_critical(&self, t: f64) -> Result<(f64, f64)> {
        let (re, im) = self.zeta_critical_big(t)?;
        Ok((re.to_f64(), im.to_f64()))
    }

    /// |ζ(1/2 + it)|.
    pub fn zeta_abs(&self, t: f64) -> Result<f64> {
        let (re, im) = self.zeta_critical_big(t)?;
        Ok(Cx { re, im }.abs_f64())
    }

    /// Z(t) = Re(e^{iθ} ζ(1/2 + it)) at full working precision.
    pub fn hardy_z_big(&self, t: f64) -> Result<Float> {
        let th = self.theta_big(t)?;
        let (zr, zi) = self.zeta_critical_big(t)?;
        let prec = zr.prec();
        let (s, c) = th.sin_cos(Float::new(prec));
        let real = Float::with_val(prec, &c * &zr) - Float::with_val(prec, &s * &zi);
        let imag = Float::with_val(prec, &s * &zr) + Float::with_val(prec, &c * &zi);
        let scale = Float::with_val(prec, real.abs_ref()).to_f64().max(1.0);
        let limit = 10f64.powi(-(self.working_digits as i32 - 8)) * scale;
        if imag.to_f64().abs() > limit {
            return Err(Error::Precision(format!(
                "imaginary part {} of e^(iθ)ζ at t = {t} exceeds {limit:e}",
                imag.to_f64()
            )));
        }
        Ok(real)
    }

    pub fn hardy_z(&self, t: f64) -> Result<f64> {
        Ok(self.hardy_z_big(t)?.to_f64())
    }

    fn tables(&self) -> &DdTables {
        self.tables
            .get_or_init(|| DdTables::build(Self::em_cutoff(self.t_max) + 1))
    }

    /// Σ_{n<N} n^(−1/2) e^(−it ln n) in double-double.
    fn main_sum_dd(&self, t: f64, n_cut: usize) -> (Dd, Dd) {
        let tabs = self.tables();
        debug_assert!(n_cut < tabs.spf.len());
        let half = (n_cut - 1) / 2;
        let mut stored: Vec<(Dd, Dd)> = Vec::with_capacity(half + 1);
        stored.push((Dd::ZERO, Dd::ZERO));
        let mut re = Dd::ZERO;
        let mut im = Dd::ZERO;
        let mut prime_cursor = 0usize;
        for n in 1..n_cut {
            let a = if n == 1 {
                (Dd::ONE, Dd::ZERO)
            } else {
                let p = tabs.spf[n] as usize;
                if p == n {
                    let pd = tabs.primes[prime_cursor];
                    prime_cursor += 1;
                    let (s, c) = reduce_phase(t, &pd.ln).sin_cos();
                    (pd.rsqrt * c, -(pd.rsqrt * s))
                } else {
                    let (ar, ai) = stored[p];
                    let (br, bi) = stored[n / p];
                    (ar * br - ai * bi, ar * bi + ai * br)
                }
            };
            if n <= half {
                stored.push(a);
            }
            re = re + a.0;
            im = im + a.1;
        }
        (re, im)
    }

    /// Euler–Maclaurin remainder for cut-off N:
    /// N^(1−s)/(s−1) + N^(−s)/2 + Σ_k B_2k/(2k)! s(s+1)…(s+2k−2) N^(1−s−2k).
    fn em_tail(&self, prec: u32, t: f64, n_cut: usize) -> Result<Cx> {
        let nf = Float::with_val(prec, n_cut);
        let ln_n = Float::with_val(prec, nf.ln_ref());
        let phase = Float::with_val(prec, &ln_n * t);
        let (s, c) = phase.sin_cos(Float::new(prec));
        let rsqrt = Float::with_val(prec, nf.recip_sqrt_ref());
        // N^(−s)
        let n_s = Cx {
            re: Float::with_val(prec, &c * &rsqrt),
            im: -Float::with_val(prec, &s * &rsqrt),
        };
        let s_minus_1 = Cx::new(prec, -0.5, t);
        let first = n_s.scale(&nf).mul(&s_minus_1.recip());
        let mut total = first.add(&n_s.scale(&Float::with_val(prec, 0.5)));

        let s_val = Cx::new(prec, 0.5, t);
        let inv_n = Float::with_val(prec, nf.recip_ref());
        let inv_n2 = Float::with_val(prec, inv_n.clone().square());
        // u_k = s(s+1)…(s+2k−2) N^(1−s−2k)
        let mut u = s_val.mul(&n_s).scale(&inv_n);
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let inv_two_pi_sq = Float::with_val(prec, two_pi.square().recip_ref());
        let mut pow = Float::with_val(prec, 1);
        let eps = self.eps();
        for k in 1..=MAX_TAIL_TERMS as u32 {
            pow *= &inv_two_pi_sq;
            // B_2k/(2k)! = (−1)^(k+1) 2 ζ(2k) / (2π)^(2k)
            let mut b = Float::with_val(prec, Float::zeta_u(2 * k)) * &pow * 2u32;
            if k % 2 == 0 {
                b = -b;
            }
            let term = u.scale(&b);
            let size = term.abs_f64();
            total = total.add(&term);
            if size < eps {
                return Ok(total);
            }
            let a1 = Cx::new(prec, 0.5 + (2 * k - 1) as f64, t);
            let a2 = Cx::new(prec, 0.5 + (2 * k) as f64, t);
            u = u.mul(&a1).mul(&a2).scale(&inv_n2);
        }
        Err(Error::Precision(format!(
            "Euler–Maclaurin tail not converged after {MAX_TAIL_TERMS} terms at t = {t}"
        )))
    }
}

/// B_2k / (2k(2k−1)) via ζ(2k).
fn stirling_coeff(prec: u32, k: u32) -> Float {
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let fact = Float::with_val(prec, Float::factorial(2 * k - 2));
    let mut b = Float::with_val(prec, Float::zeta_u(2 * k)) * 2u32 * fact / two_pi.pow(2 * k);
    if k % 2 == 0 {
        b = -b;
    }
    b
}

fn main_sum_mpfr(prec: u32, t: f64, n_cut: usize) -> Cx {
    let mut re = Float::new(prec);
    let mut im = Float::new(prec);
    for n in 1..n_cut {
        let nf = Float::with_val(prec, n);
        let phase = Float::with_val(prec, nf.ln_ref()) * t;
        let (s, c) = phase.sin_cos(Float::new(prec));
        let r = nf.recip_sqrt();
        re += Float::with_val(prec, &c * &r);
        im -= s * r;
    }
    Cx { re, im }
}

/// t·(l0 + l1 + l2) modulo 2π, in [−π, π] as a double-double.
fn reduce_phase(t: f64, ln: &[f64; 3]) -> Dd {
    let (p0, e0) = two_prod(t, ln[0]);
    let (p1, e1) = two_prod(t, ln[1]);
    let p2 = t * ln[2];
    let k = (p0 / TWO_PI.hi).round();
    let (q0, f0) = two_prod(k, TWO_PI.hi);
    let (q1, f1) = two_prod(k, TWO_PI.lo);
    let (hi, lo) = quick_two_sum(p0 - q0, 0.0);
    Dd::new(hi, lo)
        .add_f64(e0)
        .add_f64(-f0)
        .add_f64(p1)
        .add_f64(-q1)
        .add_f64(e1 - f1)
        .add_f64(p2 - k * TWO_PI_TAIL)
}

impl DdTables {
    fn build(limit: usize) -> Self {
        let mut spf = vec![0u32; limit];
        for i in 2..limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                let mut j = i.saturating_mul(i);
                while j < limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let prec = 200;
        let primes = (2..limit)
            .filter(|&n| spf[n] as usize == n)
            .map(|p| {
                let pf = Float::with_val(prec, p);
                let l = Float::with_val(prec, pf.ln_ref());
                let l0 = l.to_f64();
                let r1 = Float::with_val(prec, &l - l0);
                let l1 = r1.to_f64();
                let l2 = Float::with_val(prec, &r1 - l1).to_f64();
                let rs = pf.recip_sqrt();
                let h = rs.to_f64();
                let lo = Float::with_val(prec, &rs - h).to_f64();
                PrimeData {
                    ln: [l0, l1, l2],
                    rsqrt: Dd::new(h, lo),
                }
            })
            .collect();
        DdTables { spf, primes }
    }
}

/// Reference Z(t); see [`HiPrecOracle`].
pub fn hardy_z_oracle(t: f64, o: &HiPrecOracle) -> Result<f64> {
    o.hardy_z(t)
}

/// Root of the oracle Z in a bracket with a sign change, by bisection.
pub fn oracle_root(o: &HiPrecOracle, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = o.hardy_z(lo)?;
    let fhi = o.hardy_z(hi)?;
    if flo * fhi > 0.0 {
        return Err(precondition(format!("no sign change of Z on [{lo}, {hi}]")));
    }
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        let fm = o.hardy_z(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(HiPrecOracle::new(29).is_err());
        assert!(HiPrecOracle::new(30).is_ok());
    }

    #[test]
    fn exact_theta_reference_values() {
        let o = HiPrecOracle::new(30).unwrap();
        // mpmath.siegeltheta
        assert!((o.theta(100.0).unwrap() - 87.972_165_231_787_2).abs() < 1e-12);
        assert!(o.theta(17.845_599_540_410_86).unwrap().abs() < 1e-13);
        assert!((o.theta(1e6).unwrap() - 5_488_816.353_078_403).abs() < 2e-9);
    }

    #[test]
    fn z_at_ten_thousand_matches_reference() {
        let o = HiPrecOracle::new(30).unwrap();
        let z = o.hardy_z_big(1e4).unwrap();
        let exact = Float::with_val(z.prec(), Float::parse("-0.341394724231208559").unwrap());
        assert!((z - exact).to_f64().abs() < 1e-17);
    }

    #[test]
    fn double_double_path_matches_mpfr_path() {
        let fast = HiPrecOracle::new(30).unwrap().with_t_max(1e4);
        let slow = HiPrecOracle::new(34).unwrap();
        for &t in &[150.0, 1234.5, 9999.0] {
            let a = fast.hardy_z_big(t).unwrap();
            let b = slow.hardy_z_big(t).unwrap();
            let d = Float::with_val(200, &a - &b).to_f64().abs();
            assert!(d < 1e-25, "t={t}: {d:e}");
        }
    }

    #[test]
    fn first_zero() {
        let o = HiPrecOracle::new(30).unwrap();
        assert!(o.hardy_z(14.134_725_141_734_693).unwrap().abs() < 1e-14);
        let g = oracle_root(&o, 14.0, 14.3).unwrap();
        assert!((g - 14.134_725_141_734_694).abs() < 1e-13);
    }

    #[test]
    fn zeta_abs_equals_abs_z() {
        let o = HiPrecOracle::new(30).unwrap();
        for &t in &[300.0, 4321.0] {
            let z = o.hardy_z(t).unwrap();
            let a = o.zeta_abs(t).unwrap();
            assert!((z.abs() - a).abs() < 1e-15);
        }
    }
}
