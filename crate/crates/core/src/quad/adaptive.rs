//! Globally adaptive Gauss–Kronrod quadrature over intervals and interval
//! collections.
//!
//! Refinement runs in rounds. Each round evaluates the new panels in
//! parallel, then sums all panels in left-to-right order and bisects every
//! panel whose error exceeds its length-proportional share of the
//! tolerance. The node set depends only on (f, interval, spec).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gk::{gk21, NODES};
use crate::error::{Error, Result};
use crate::grid::{Interval, IntervalCollection};
use crate::sum::CompensatedSum;

/// Hard limit on the number of live panels per interval.
const MAX_PANELS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum QuadRule {
    AdaptiveNested,
    /// `panels` equal panels per segment, no refinement.
    FixedPanel { panels: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub rule: QuadRule,
    /// Initial panels are no wider than this.
    pub max_panel: Option<f64>,
}

pub const MAX_DEPTH_LIMIT: u32 = 60;

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-6,
            max_depth: 30,
            rule: QuadRule::AdaptiveNested,
            max_panel: None,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Config(format!("rel_tol {} must be positive", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Config(format!("abs_tol {} must be positive", self.abs_tol)));
        }
        if self.max_depth > MAX_DEPTH_LIMIT {
            return Err(Error::Config(format!(
                "max_depth {} exceeds {MAX_DEPTH_LIMIT}",
                self.max_depth
            )));
        }
        if let QuadRule::FixedPanel { panels: 0 } = self.rule {
            return Err(Error::Config("fixed-panel rule needs at least one panel".into()));
        }
        if let Some(w) = self.max_panel {
            if !(w > 0.0) {
                return Err(Error::Config(format!("max_panel {w} must be positive")));
            }
        }
        Ok(())
    }

    /// max(abs_tol, rel_tol·|value|).
    pub fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOutcome {
    pub value: f64,
    pub error_estimate: f64,
    /// Target the error estimate was held to.
    pub tolerance: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
    pub converged: bool,
    /// Panels (or collection members) that missed their share.
    pub failed_intervals: Vec<Interval>,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    value: f64,
    error: f64,
}

fn check_breaks(breaks: &[f64]) -> Result<()> {
    if breaks.len() < 2 {
        return Err(Error::Precondition("need at least two breakpoints".into()));
    }
    for (i, w) in breaks.windows(2).enumerate() {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::Precondition(format!(
                "segment {i} = ({}, {}) is empty or not finite",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

fn evaluate<F: Fn(f64) -> f64 + Sync>(f: &F, cells: Vec<(f64, f64, u32)>) -> Result<Vec<Panel>> {
    cells
        .into_par_iter()
        .map(|(a, b, depth)| {
            let r = gk21(f, a, b);
            if !r.finite {
                return Err(Error::Precondition(format!("integrand not finite on ({a}, {b})")));
            }
            Ok(Panel {
                a,
                b,
                depth,
                value: r.value,
                error: r.error,
            })
        })
        .collect()
}

/// Split each segment into `per` equal cells, and further so no cell is
/// wider than `max_panel`.
fn initial_cells(breaks: &[f64], per: usize, max_panel: Option<f64>) -> Vec<(f64, f64, u32)> {
    let mut cells = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut n = per;
        if let Some(mp) = max_panel {
            n = n.max(((b - a) / mp).ceil() as usize);
        }
        for i in 0..n {
            let lo = if i == 0 { a } else { a + (b - a) * i as f64 / n as f64 };
            let hi = if i + 1 == n { b } else { a + (b - a) * (i + 1) as f64 / n as f64 };
            cells.push((lo, hi, 0));
        }
    }
    cells
}

fn totals(panels: &[Panel]) -> (f64, f64) {
    let mut v = CompensatedSum::new();
    let mut e = CompensatedSum::new();
    for p in panels {
        v.add(p.value);
        e.add(p.error);
    }
    (v.value(), e.value())
}

/// ∫ f over [breaks[0], breaks[last]], with panels never straddling a
/// breakpoint.
pub fn integrate_breaks<F>(f: &F, breaks: &[f64], q: &QuadSpec) -> Result<QuadratureOutcome>
where
    F: Fn(f64) -> f64 + Sync,
{
    q.validate()?;
    check_breaks(breaks)?;
    let per = match q.rule {
        QuadRule::AdaptiveNested => 1,
        QuadRule::FixedPanel { panels } => panels,
    };
    let mut panels = evaluate(f, initial_cells(breaks, per, q.max_panel))?;
    let mut evaluations = panels.len() * NODES;
    let mut subdivisions = 0;
    let length = breaks[breaks.len() - 1] - breaks[0];
    loop {
        let (value, error) = totals(&panels);
        let tol = q.tolerance(value);
        let share = |p: &Panel| tol * (p.b - p.a) / length;
        let converged = error <= tol;
        let adaptive = matches!(q.rule, QuadRule::AdaptiveNested);
        let wants: Vec<bool> = panels.iter().map(|p| p.error > share(p)).collect();
        let can_split = |p: &Panel| p.depth < q.max_depth && 0.5 * (p.a + p.b) > p.a && 0.5 * (p.a + p.b) < p.b;
        let splittable = panels.iter().zip(&wants).any(|(p, &w)| w && can_split(p));
        if converged || !adaptive || !splittable || panels.len() >= MAX_PANELS {
            let failed = if converged {
                Vec::new()
            } else {
                panels
                    .iter()
                    .zip(&wants)
                    .filter(|(_, &w)| w)
                    .map(|(p, _)| Interval::new(p.a, p.b))
                    .collect()
            };
            return Ok(QuadratureOutcome {
                value,
                error_estimate: error,
                tolerance: tol,
                evaluations,
                subdivisions,
                converged,
                failed_intervals: failed,
            });
        }
        let mut keep: Vec<Option<Panel>> = Vec::with_capacity(panels.len());
        let mut cells = Vec::new();
        for (p, &w) in panels.iter().zip(&wants) {
            if w && can_split(p) {
                let m = 0.5 * (p.a + p.b);
                cells.push((p.a, m, p.depth + 1));
                cells.push((m, p.b, p.depth + 1));
                keep.push(None);
                keep.push(None);
                subdivisions += 1;
            } else {
                keep.push(Some(*p));
            }
        }
        evaluations += cells.len() * NODES;
        let mut fresh = evaluate(f, cells)?.into_iter();
        panels = keep
            .into_iter()
            .map(|slot| slot.unwrap_or_else(|| fresh.next().expect("one new panel per slot")))
            .collect();
    }
}

/// ∫ f over [lo, hi].
pub fn integrate_interval<F>(f: &F, lo: f64, hi: f64, q: &QuadSpec) -> Result<QuadratureOutcome>
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_breaks(f, &[lo, hi], q)
}

/// Sum of per-member integrals over a nonempty collection, each member
/// held to its own tolerance. Values are summed in member order.
pub fn integrate_collection<F>(f: &F, c: &IntervalCollection, q: &QuadSpec) -> Result<QuadratureOutcome>
where
    F: Fn(f64) -> f64 + Sync,
{
    if c.is_empty() {
        return Err(Error::Precondition(format!("cannot integrate over empty collection {}", c.label())));
    }
    q.validate()?;
    let parts: Vec<QuadratureOutcome> = c
        .intervals()
        .par_iter()
        .map(|iv| integrate_interval(f, iv.lo, iv.hi, q))
        .collect::<Result<_>>()?;
    let mut value = CompensatedSum::new();
    let mut error = CompensatedSum::new();
    let mut tolerance = CompensatedSum::new();
    let mut out = QuadratureOutcome {
        value: 0.0,
        error_estimate: 0.0,
        tolerance: 0.0,
        evaluations: 0,
        subdivisions: 0,
        converged: true,
        failed_intervals: Vec::new(),
    };
    for (iv, p) in c.intervals().iter().zip(parts) {
        value.add(p.value);
        error.add(p.error_estimate);
        tolerance.add(p.tolerance);
        out.evaluations += p.evaluations;
        out.subdivisions += p.subdivisions;
        if !p.converged {
            out.converged = false;
            out.failed_intervals.push(*iv);
        }
    }
    out.value = value.value();
    out.error_estimate = error.value();
    out.tolerance = tolerance.value();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SetLabel;
    use std::f64::consts::PI;

    #[test]
    fn sine_to_1e_12() {
        let q = QuadSpec { rel_tol: 1e-13, abs_tol: 1e-14, ..QuadSpec::default() };
        let r = integrate_interval(&f64::sin, 0.0, PI, &q).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.converged && r.evaluations >= NODES);
    }

    #[test]
    fn adapts_to_a_peak() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let q = QuadSpec { rel_tol: 1e-11, abs_tol: 1e-12, ..QuadSpec::default() };
        let r = integrate_interval(&f, -1.0, 1.0, &q).unwrap();
        let truth = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!(r.converged && r.subdivisions > 3);
        assert!((r.value - truth).abs() <= 10.0 * r.error_estimate.max(1e-13 * truth));
    }

    #[test]
    fn depth_limit_reports_failure() {
        let f = |x: f64| if x < 0.123_456_789 { 0.0 } else { 1.0 };
        let q = QuadSpec { rel_tol: 1e-15, abs_tol: 1e-300, max_depth: 4, ..QuadSpec::default() };
        let r = integrate_interval(&f, 0.0, 1.0, &q).unwrap();
        assert!(!r.converged);
        assert!(r.failed_intervals.iter().any(|iv| iv.lo <= 0.123_456_789 && iv.hi >= 0.123_456_789));
    }

    #[test]
    fn fixed_panel_rule() {
        let q = QuadSpec { rule: QuadRule::FixedPanel { panels: 7 }, ..QuadSpec::default() };
        let r = integrate_breaks(&f64::exp, &[0.0, 0.5, 2.0], &q).unwrap();
        assert_eq!(r.evaluations, 14 * NODES);
        assert!((r.value - (2.0f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn collections() {
        let c = IntervalCollection::new(
            vec![Interval::new(0.0, 1.0), Interval::new(2.0, 3.0)],
            SetLabel::Other,
            (0.0, 3.0),
        )
        .unwrap();
        let q = QuadSpec::default();
        let r = integrate_collection(&|x: f64| x, &c, &q).unwrap();
        assert!((r.value - 3.0).abs() < 1e-14);
        let one = IntervalCollection::new(vec![Interval::new(0.0, 1.0)], SetLabel::Other, (0.0, 3.0)).unwrap();
        assert_eq!(
            integrate_collection(&f64::cos, &one, &q).unwrap().value,
            integrate_interval(&f64::cos, 0.0, 1.0, &q).unwrap().value
        );
        let empty = IntervalCollection::empty(SetLabel::G1, (0.0, 1.0));
        assert!(matches!(integrate_collection(&f64::cos, &empty, &q), Err(Error::Precondition(_))));
    }

    #[test]
    fn bad_specs() {
        let q = QuadSpec { max_depth: 61, ..QuadSpec::default() };
        assert!(integrate_interval(&f64::sin, 0.0, 1.0, &q).is_err());
        assert!(integrate_interval(&f64::sin, 1.0, 1.0, &QuadSpec::default()).is_err());
        let nan = |x: f64| if x > 0.5 { f64::NAN } else { x };
        assert!(integrate_interval(&nan, 0.0, 1.0, &QuadSpec::default()).is_err());
    }
}
