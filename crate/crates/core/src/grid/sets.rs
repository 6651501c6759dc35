//! The interval systems G1(x) (even ν) and G2(y) (odd ν).

use rayon::prelude::*;

use super::interval::{Interval, IntervalCollection, SetLabel};
use super::solve::{default_tol, grid_range, solve_grid_point, GramLikePoint};
use super::window::WindowSpec;
use crate::error::{Error, Result};

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
const PI: f64 = std::f64::consts::PI;

fn check_half_width(x: f64, what: &'static str) -> Result<()> {
    if !(x > 0.0 && x <= HALF_PI) {
        return Err(Error::Domain {
            what,
            value: x,
            domain: "(0, π/2]",
        });
    }
    Ok(())
}

/// Window declared for a G-set: from t_first(−π) to t_last(π), which holds
/// every interval for any half-width up to π/2.
fn declared_window(w: &WindowSpec, pts: &[GramLikePoint]) -> Result<(f64, f64)> {
    match (pts.first(), pts.last()) {
        (Some(a), Some(b)) => {
            let tol = default_tol(w.end());
            let lo = solve_grid_point(a.nu, -PI, tol)?.t.min(w.t());
            let hi = solve_grid_point(b.nu, PI, tol)?.t.max(w.end());
            Ok((lo, hi))
        }
        _ => Ok((w.t(), w.end())),
    }
}

fn build(w: &WindowSpec, half: f64, parity: i64, label: SetLabel) -> Result<IntervalCollection> {
    let pts = grid_range(w)?;
    let window = declared_window(w, &pts)?;
    let tol = default_tol(w.end());
    let intervals: Vec<Interval> = pts
        .par_iter()
        .filter(|p| p.nu.rem_euclid(2) == parity)
        .map(|p| {
            let lo = solve_grid_point(p.nu, -half, tol)?.t;
            let hi = solve_grid_point(p.nu, half, tol)?.t;
            Ok(Interval::new(lo, hi))
        })
        .collect::<Result<_>>()?;
    IntervalCollection::new(intervals, label, window)
}

/// G1(x; T, H): intervals (t_2ν(−x), t_2ν(x)) for T ≤ t_2ν ≤ T + H.
pub fn build_g1(w: &WindowSpec, x: f64) -> Result<IntervalCollection> {
    check_half_width(x, "build_g1 x")?;
    build(w, x, 0, SetLabel::G1)
}

/// G2(y; T, H): intervals (t_2ν+1(−y), t_2ν+1(y)) for T ≤ t_2ν+1 ≤ T + H.
pub fn build_g2(w: &WindowSpec, y: f64) -> Result<IntervalCollection> {
    check_half_width(y, "build_g2 y")?;
    build(w, y, 1, SetLabel::G2)
}
