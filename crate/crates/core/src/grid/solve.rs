//! Generalized Gram points: solutions of θ(t) = πν + τ.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::window::WindowSpec;
use crate::dd::{Dd, HALF_PI as HALF_PI_DD, PI as PI_DD};
use crate::error::{Error, Result};
use crate::rs::theta::{theta_dd, theta_deriv_unchecked, ThetaExpansion};

const PI: f64 = std::f64::consts::PI;
const TWO_PI: f64 = 2.0 * PI;
const MAX_ITER: usize = 100;

/// Default residual tolerance for a grid point near height t.
pub fn default_tol(t: f64) -> f64 {
    1e-10 * t
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramLikePoint {
    pub nu: i64,
    pub tau: f64,
    pub t: f64,
}

impl GramLikePoint {
    /// θ(t) − πν − τ, in double-double before rounding.
    pub fn residual(&self) -> f64 {
        (theta_dd(self.t, ThetaExpansion::full()) - target(self.nu, self.tau)).to_f64()
    }
}

/// πν + τ in double-double; τ = ±π/2 and ±π (as rounded doubles) stand
/// for the exact values so that t_ν(π/2) and t_ν+1(−π/2) coincide.
fn target(nu: i64, tau: f64) -> Dd {
    let base = PI_DD.mul_f64(nu as f64);
    if tau.abs() == std::f64::consts::FRAC_PI_2 {
        base + HALF_PI_DD.mul_f64(tau.signum())
    } else if tau.abs() == PI {
        base + PI_DD.mul_f64(tau.signum())
    } else {
        base.add_f64(tau)
    }
}

/// Principal branch of Lambert W for x ≥ 0, by Halley iteration.
fn lambert_w(x: f64) -> f64 {
    let mut w = if x < 3.0 { (1.0 + x).ln() * 0.75 } else { x.ln() - x.ln().ln() };
    for _ in 0..30 {
        let ew = w.exp();
        let f = w * ew - x;
        let step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        if step.abs() <= 1e-15 * w.abs().max(1e-300) {
            break;
        }
    }
    w
}

/// Inverse of the main terms (t/2) ln(t/2πe) − π/8.
fn initial_guess(theta: f64) -> f64 {
    let x = (theta + PI / 8.0) / (PI * std::f64::consts::E);
    if x <= 0.0 {
        return TWO_PI * std::f64::consts::E;
    }
    TWO_PI * std::f64::consts::E * x / lambert_w(x)
}

/// Solve θ(t) = πν + τ for `nu >= 1`, `tau ∈ [−π, π]`.
///
/// Newton on θ with a bisection safeguard; iterates until the step is at
/// the rounding level of t, then checks `|θ(t) − πν − τ| <= tol`.
pub fn solve_grid_point(nu: i64, tau: f64, tol: f64) -> Result<GramLikePoint> {
    if nu < 1 {
        return Err(Error::Domain {
            what: "solve_grid_point nu",
            value: nu as f64,
            domain: "nu >= 1",
        });
    }
    if !(tau.abs() <= PI) {
        return Err(Error::Domain {
            what: "solve_grid_point tau",
            value: tau,
            domain: "[-π, π]",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("solver tolerance {tol} must be positive")));
    }
    let goal = target(nu, tau);
    let exp = ThetaExpansion::full();
    let f = |t: f64| (theta_dd(t, exp) - goal).to_f64();

    // θ(2π⁺) < −3 while every admissible target is ≥ 0.
    let mut lo = TWO_PI * (1.0 + 1e-12);
    let mut hi = initial_guess(goal.hi).max(lo * 2.0) * 1.5;
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut t = initial_guess(goal.hi).clamp(lo, hi);
    let mut best = (f64::INFINITY, t);
    for _ in 0..MAX_ITER {
        let ft = f(t);
        if ft.abs() < best.0 {
            best = (ft.abs(), t);
        }
        if ft == 0.0 {
            break;
        }
        if ft < 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
        let mut next = t - ft / theta_deriv_unchecked(t);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let settled = (next - t).abs() <= 2.0 * f64::EPSILON * t || hi - lo <= 2.0 * f64::EPSILON * hi;
        t = next;
        if settled {
            let ft = f(t);
            if ft.abs() < best.0 {
                best = (ft.abs(), t);
            }
            break;
        }
    }
    let (res, t) = best;
    if res > tol {
        return Err(Error::NonConvergence {
            what: "solve_grid_point",
            iterations: MAX_ITER,
            lo,
            hi,
        });
    }
    Ok(GramLikePoint { nu, tau, t })
}

/// Range of ν with θ(a) ≤ πν ≤ θ(b), widened by one on each side.
pub(crate) fn nu_bounds(a: f64, b: f64) -> (i64, i64) {
    let exp = ThetaExpansion::full();
    let lo = (theta_dd(a, exp).to_f64() / PI).ceil() as i64 - 1;
    let hi = (theta_dd(b, exp).to_f64() / PI).floor() as i64 + 1;
    (lo.max(1), hi.max(1))
}

/// Classical grid points t_ν = t_ν(0) in [a, b], with consecutive ν.
pub fn grid_points_between(a: f64, b: f64) -> Result<Vec<GramLikePoint>> {
    if !(a <= b) || !b.is_finite() {
        return Err(Error::Precondition(format!("bad grid range ({a}, {b})")));
    }
    let (nlo, nhi) = nu_bounds(a, b);
    let pts: Vec<GramLikePoint> = (nlo..=nhi)
        .into_par_iter()
        .map(|nu| solve_grid_point(nu, 0.0, default_tol(b)))
        .collect::<Result<_>>()?;
    Ok(pts.into_iter().filter(|p| p.t >= a && p.t <= b).collect())
}

/// All classical grid points in [T, T + H].
pub fn grid_range(w: &WindowSpec) -> Result<Vec<GramLikePoint>> {
    grid_points_between(w.t(), w.end())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambert_w_values() {
        for &x in &[0.0, 0.1, 1.0, std::f64::consts::E, 50.0, 1e7] {
            let w = lambert_w(x);
            assert!((w * w.exp() - x).abs() <= 1e-13 * x.max(1.0), "x={x}");
        }
    }

    #[test]
    fn classical_gram_points() {
        // t_1(−π) = t_0 and t_1(0) from bisection on the exact θ
        let g0 = solve_grid_point(1, -PI, 1e-12).unwrap();
        assert!((g0.t - 17.845_599_540_410_86).abs() < 1e-9, "{}", g0.t);
        let g1 = solve_grid_point(1, 0.0, 1e-12).unwrap();
        assert!((g1.t - 23.170_282_701_246_31).abs() < 1e-9, "{}", g1.t);
    }

    #[test]
    fn step_identity() {
        for &nu in &[1i64, 40, 1_000_000] {
            let a = solve_grid_point(nu, PI, 1e-6).unwrap();
            let b = solve_grid_point(nu + 1, 0.0, 1e-6).unwrap();
            assert!((a.t - b.t).abs() <= 4.0 * f64::EPSILON * a.t);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(solve_grid_point(0, 0.0, 1e-9).is_err());
        assert!(solve_grid_point(5, 3.2, 1e-9).is_err());
        assert!(solve_grid_point(5, 0.0, 0.0).is_err());
        assert!(matches!(
            solve_grid_point(10_000_000, 0.0, 1e-30),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn count_at_one_million() {
        let w = WindowSpec::with_h(1e6, 1e3).unwrap();
        let pts = grid_range(&w).unwrap();
        let expected = 1e3 * theta_deriv_unchecked(1e6 + 500.0) / PI;
        assert!((pts.len() as f64 - expected).abs() <= 2.0, "{} vs {expected}", pts.len());
        for pair in pts.windows(2) {
            assert_eq!(pair[1].nu, pair[0].nu + 1);
            assert!(pair[1].t > pair[0].t);
        }
        for p in &pts {
            assert!(p.t >= 1e6 && p.t <= 1e6 + 1e3);
            assert!(p.residual().abs() <= default_tol(p.t));
        }
    }
}
