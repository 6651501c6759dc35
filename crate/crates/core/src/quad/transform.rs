//! The substitution check: ∫ over [T̊, (T+U)°] of f(φ₁(t))·φ₁'(t) against
//! ∫ over [T, T+U] of f.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adaptive::{integrate_breaks, QuadSpec, QuadratureOutcome};
use crate::error::{Error, Result};
use crate::grid::grid_points_between;
use crate::ladder::{mirror_point, LadderModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformResidual {
    pub t_ring: f64,
    pub end_ring: f64,
    /// Mirrored side.
    pub lhs: QuadratureOutcome,
    pub rhs: QuadratureOutcome,
    /// |lhs − rhs|.
    pub residual: f64,
    /// Sum of the two sides' tolerances.
    pub tolerance: f64,
}

impl TransformResidual {
    pub fn within(&self, factor: f64) -> bool {
        self.residual <= factor * self.tolerance
    }
}

/// Breakpoints for [lo, hi]: the ends plus every classical grid point
/// strictly inside.
pub fn grid_breaks(lo: f64, hi: f64) -> Result<Vec<f64>> {
    let mut b = vec![lo];
    b.extend(grid_points_between(lo, hi)?.into_iter().map(|p| p.t).filter(|&t| t > lo && t < hi));
    b.push(hi);
    Ok(b)
}

/// Both sides of the substitution identity on [T, T + U]. The original
/// side is split at grid points and the mirrored side at their mirrors,
/// so corresponding panels map onto each other.
pub fn transform_residual<F>(m: &dyn LadderModel, f: &F, t: f64, u: f64, q: &QuadSpec) -> Result<TransformResidual>
where
    F: Fn(f64) -> f64 + Sync,
{
    q.validate()?;
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "transform_residual T",
            value: t,
            domain: "T > 1",
        });
    }
    if !(u > 0.0 && u <= t / t.ln()) {
        return Err(Error::Domain {
            what: "transform_residual U",
            value: u,
            domain: "(0, T/ln T]",
        });
    }
    let breaks = grid_breaks(t, t + u)?;
    let mut ring: Vec<f64> = breaks
        .par_iter()
        .map(|&x| mirror_point(m, x))
        .collect::<Result<_>>()?;
    ring.dedup();
    let lhs_f = |s: f64| match (m.eval(s), m.deriv(s)) {
        (Ok(v), Ok(d)) => f(v) * d,
        _ => f64::NAN,
    };
    let lhs = integrate_breaks(&lhs_f, &ring, q)?;
    let rhs = integrate_breaks(f, &breaks, q)?;
    Ok(TransformResidual {
        t_ring: ring[0],
        end_ring: ring[ring.len() - 1],
        residual: (lhs.value - rhs.value).abs(),
        tolerance: lhs.tolerance + rhs.tolerance,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{ladder_asymptotic, IdentityLadder};

    #[test]
    fn identity_ladder_is_trivial() {
        let m = IdentityLadder::new((100.0, 1e9));
        let r = transform_residual(&m, &|x: f64| x.sin(), 1e4, 50.0, &QuadSpec::default()).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!((r.t_ring, r.end_ring), (1e4, 1e4 + 50.0));
    }

    #[test]
    fn any_smooth_ladder_works() {
        let m = ladder_asymptotic((10.0, 1e7)).unwrap();
        let q = QuadSpec::default();
        let r = transform_residual(&m, &|_| 1.0, 1e5, 300.0, &q).unwrap();
        assert!((r.rhs.value - 300.0).abs() < 1e-9);
        assert!(r.within(10.0), "{r:?}");
        let cubic = |x: f64| {
            let y = x / 1e5 - 1.0;
            2.0 - 3.0 * y + 0.5 * y * y + 7.0 * y * y * y
        };
        let r = transform_residual(&m, &cubic, 1e5, 300.0, &q).unwrap();
        let anti = |x: f64| {
            let y = x / 1e5 - 1.0;
            1e5 * (2.0 * y - 1.5 * y * y + y * y * y / 6.0 + 1.75 * y.powi(4))
        };
        assert!((r.rhs.value - (anti(1e5 + 300.0) - anti(1e5))).abs() < 1e-9);
        assert!(r.within(10.0), "{r:?}");
    }

    #[test]
    fn hypothesis_on_u() {
        let m = IdentityLadder::new((100.0, 1e9));
        let q = QuadSpec::default();
        assert!(transform_residual(&m, &|x: f64| x, 1e4, 2000.0, &q).is_err());
        assert!(transform_residual(&m, &|x: f64| x, 1e4, 0.0, &q).is_err());
    }
}
