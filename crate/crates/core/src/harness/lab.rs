//! Objects shared by the experiments of one configuration.

use crate::error::{Error, Result};
use crate::grid::{mean_zero_gap, IntervalCollection, WindowSpec};
use crate::ladder::{ladder_asymptotic, mirror_collection, mirror_point, AsymptoticLadder, LadderKind, LadderModel, OdeLadder, OdeSpec};
use crate::quad::{integrate_collection, QuadratureOutcome};
use crate::rs::hardy::hardy_z_unchecked;

use super::config::ExperimentConfig;

/// Range of the asymptotic ladder; covers mirrors of every admissible window.
pub const ASYMPTOTIC_RANGE: (f64, f64) = (10.0, 4e8);

/// Smallest rate assumed when sizing an ODE span to cover a target image.
const MIN_MEAN_RATE: f64 = 0.8;

pub struct Lab {
    pub cfg: ExperimentConfig,
    pub window: WindowSpec,
    pub asymptotic: AsymptoticLadder,
}

impl Lab {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Lab {
            cfg: cfg.clone(),
            window: cfg.window()?,
            asymptotic: ladder_asymptotic(ASYMPTOTIC_RANGE)?,
        })
    }

    /// Z(t) with the configured Riemann–Siegel settings; t ≥ 100.
    pub fn z(&self) -> impl Fn(f64) -> f64 + Sync + Copy {
        let rs = self.cfg.rs;
        move |t| hardy_z_unchecked(t, &rs)
    }

    pub fn h(&self) -> f64 {
        self.window.h()
    }

    /// An ODE ladder, anchored to the asymptotic model, whose image covers
    /// [lo, hi] with a margin of a few zero gaps on both sides.
    pub fn ode_covering(&self, lo: f64, hi: f64) -> Result<OdeLadder> {
        let margin = 4.0 * mean_zero_gap(lo) + 0.01 * (hi - lo);
        let anchor = mirror_point(&self.asymptotic, lo - margin)?;
        let spec = OdeSpec {
            ln_mode: self.cfg.ln_mode,
            rs: self.cfg.rs,
            ..OdeSpec::default()
        };
        let mut span = (hi - lo + 2.0 * margin) / MIN_MEAN_RATE;
        for _ in 0..6 {
            let m = OdeLadder::build(anchor, span, &self.asymptotic, spec)?;
            if m.image()?.1 >= hi + 0.5 * margin {
                return Ok(m);
            }
            span *= 1.5;
        }
        Err(Error::Precondition(format!(
            "ODE ladder from {anchor} did not reach {hi} within span {span}"
        )))
    }

    /// The configured mirroring ladder with image covering [lo, hi].
    pub fn ladder_covering(&self, lo: f64, hi: f64) -> Result<Box<dyn LadderModel>> {
        match self.cfg.ladder_kind {
            LadderKind::Ode => Ok(Box::new(self.ode_covering(lo, hi)?)),
            _ => Ok(Box::new(self.asymptotic)),
        }
    }

    /// Mirror of `c` and ∫ over it of Z[φ₁(t)]·φ₁'(t).
    pub fn mirrored_integral(
        &self,
        m: &dyn LadderModel,
        c: &IntervalCollection,
    ) -> Result<(IntervalCollection, QuadratureOutcome)> {
        let ring = mirror_collection(m, c)?;
        let z = self.z();
        let f = |t: f64| match (m.eval(t), m.deriv(t)) {
            (Ok(v), Ok(d)) => z(v) * d,
            _ => f64::NAN,
        };
        let out = integrate_collection(&f, &ring, &self.cfg.quad)?;
        Ok((ring, out))
    }
}
