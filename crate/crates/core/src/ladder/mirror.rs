//! Inversion of a ladder: T̊ with φ₁(T̊) = T, applied to points, interval
//! collections and windows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::li::EULER_GAMMA;
use super::primes::PrimeCounter;
use super::{check_range, LadderKind, LadderModel};
use crate::error::{Error, Result};
use crate::grid::{Interval, IntervalCollection, WindowSpec};

const MAX_ITER: usize = 200;

/// φ₁(t) = t. Not a ladder (φ₁(t) < t fails) but a convenient test model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityLadder {
    range: (f64, f64),
}

impl IdentityLadder {
    pub fn new(range: (f64, f64)) -> Self {
        IdentityLadder { range }
    }
}

impl LadderModel for IdentityLadder {
    fn kind(&self) -> LadderKind {
        LadderKind::Identity
    }

    fn range(&self) -> (f64, f64) {
        self.range
    }

    fn eval(&self, t: f64) -> Result<f64> {
        check_range(t, self.range, "identity ladder")?;
        Ok(t)
    }

    fn deriv(&self, t: f64) -> Result<f64> {
        check_range(t, self.range, "identity ladder")?;
        Ok(1.0)
    }
}

/// T̊ with m.eval(T̊) = T, by Newton steps on m.slope inside a shrinking
/// bracket, falling back to bisection where the slope vanishes or a step
/// leaves the bracket.
pub fn mirror_point(m: &dyn LadderModel, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = m.range();
    let (vlo, vhi) = m.image()?;
    if !(target >= vlo && target <= vhi) {
        return Err(Error::Domain {
            what: "mirror_point",
            value: target,
            domain: "image of the ladder over its range",
        });
    }
    if target == vlo {
        return Ok(lo);
    }
    if target == vhi {
        return Ok(hi);
    }
    let mut t = lo + (hi - lo) * ((target - vlo) / (vhi - vlo));
    let mut best = (f64::INFINITY, t);
    for _ in 0..MAX_ITER {
        let v = m.eval(t)? - target;
        if v.abs() < best.0 {
            best = (v.abs(), t);
        }
        if v == 0.0 {
            return Ok(t);
        }
        if v < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi.abs() {
            break;
        }
        let s = m.slope(t)?;
        let mut next = if s > 0.0 { t - v / s } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= f64::EPSILON * t.abs() {
            let vn = m.eval(next)? - target;
            if vn.abs() < best.0 {
                best = (vn.abs(), next);
            }
            break;
        }
        t = next;
    }
    Ok(best.1)
}

/// Mirror every endpoint of `c`. The declared window is mirrored after
/// clipping it to the ladder's image.
pub fn mirror_collection(m: &dyn LadderModel, c: &IntervalCollection) -> Result<IntervalCollection> {
    let intervals: Vec<Interval> = c
        .intervals()
        .par_iter()
        .map(|iv| Ok(Interval::new(mirror_point(m, iv.lo)?, mirror_point(m, iv.hi)?)))
        .collect::<Result<_>>()?;
    let (vlo, vhi) = m.image()?;
    let (w0, w1) = c.window();
    let window = (
        mirror_point(m, w0.clamp(vlo, vhi))?,
        mirror_point(m, w1.clamp(vlo, vhi))?,
    );
    IntervalCollection::new(intervals, c.label().mirrored(), window)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    /// Mirror of T.
    pub t_ring: f64,
    /// Mirror of T + H.
    pub end_ring: f64,
    /// T̊ − (T + H).
    pub rho: f64,
    /// (1 − γ)·π(T).
    pub predicted: f64,
    /// The mirrored window does not lie above the window.
    pub violation: bool,
}

/// Gap between [T, T + H] and its mirror image, with the prime-count
/// prediction.
pub fn separation_rho(w: &WindowSpec, m: &dyn LadderModel, pc: &PrimeCounter) -> Result<Separation> {
    let t_ring = mirror_point(m, w.t())?;
    let end_ring = mirror_point(m, w.end())?;
    let rho = t_ring - w.end();
    let predicted = (1.0 - EULER_GAMMA) * pc.count(w.t())? as f64;
    Ok(Separation {
        t_ring,
        end_ring,
        rho,
        predicted,
        violation: !(rho > 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SetLabel;
    use crate::ladder::ladder_asymptotic;

    #[test]
    fn identity_mirror() {
        let m = IdentityLadder::new((0.0, 100.0));
        let c = IntervalCollection::new(
            vec![Interval::new(1.0, 2.0), Interval::new(3.5, 7.25)],
            SetLabel::G1,
            (0.0, 10.0),
        )
        .unwrap();
        let r = mirror_collection(&m, &c).unwrap();
        assert_eq!(r.intervals(), c.intervals());
        assert_eq!(r.label(), SetLabel::MirroredG1);
        assert_eq!(r.window(), (0.0, 10.0));
        assert!(mirror_point(&m, 101.0).is_err());
    }

    #[test]
    fn asymptotic_round_trip() {
        let m = ladder_asymptotic((10.0, 1e8)).unwrap();
        let mut t = 1e3;
        while t < 9e7 {
            let back = mirror_point(&m, m.eval(t).unwrap()).unwrap();
            assert!((back - t).abs() <= 1e-8 * t, "{t} {back}");
            t *= 1.37;
        }
    }

    #[test]
    fn separation_at_one_million() {
        let m = ladder_asymptotic((10.0, 1e8)).unwrap();
        let pc = PrimeCounter::sieve(2_000_000).unwrap();
        let w = WindowSpec::with_h(1e6, 1e3).unwrap();
        let s = separation_rho(&w, &m, &pc).unwrap();
        assert!(!s.violation);
        assert!((0.95..=1.05).contains(&(s.rho / s.predicted)), "{s:?}");
        let ratio = (s.t_ring - 1e6) / ((1.0 - EULER_GAMMA) * pc.count(s.t_ring).unwrap() as f64);
        assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
    }
}
