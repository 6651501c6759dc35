//! φ₁ as the running integral of Z̃², anchored to a seed model.
//!
//! The span is cut into panels about one mean zero gap wide. On each panel
//! Z̃² is interpolated at Chebyshev–Lobatto points and the interpolant is
//! integrated exactly, so `eval` is a piecewise polynomial whose derivative
//! differs from Z̃² only by the interpolation error (checked per panel
//! through the decay of the trailing coefficients).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_range, LadderKind, LadderModel};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::grid::{mean_zero_gap, Interval};
use crate::rs::hardy::{z_tilde_sq_unchecked, T_MIN};
use crate::rs::{LnFactorMode, RSConfig};
use crate::sum::CompensatedSum;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeSpec {
    /// Chebyshev degree per panel.
    pub degree: usize,
    /// Accept a panel when its last three coefficients are below
    /// `(coef_tol + ε·t·ln(t/2π)) · max(1, max |a_k|)`. The second term is
    /// the noise from rounding the nodes to doubles near height t.
    pub coef_tol: f64,
    /// Maximum number of halvings of an initial panel.
    pub max_depth: u32,
    /// Initial panel width; the mean zero gap at the anchor if unset.
    pub panel_width: Option<f64>,
    pub ln_mode: LnFactorMode,
    pub rs: RSConfig,
}

impl Default for OdeSpec {
    fn default() -> Self {
        OdeSpec {
            degree: 32,
            coef_tol: 1e-13,
            max_depth: 8,
            panel_width: None,
            ln_mode: LnFactorMode::Plain,
            rs: RSConfig::default(),
        }
    }
}

impl OdeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(4..=256).contains(&self.degree) {
            return Err(Error::Config(format!("ode degree {} outside [4, 256]", self.degree)));
        }
        if !(self.coef_tol > 0.0) {
            return Err(Error::Config(format!("ode coef_tol {} must be positive", self.coef_tol)));
        }
        if self.max_depth > 30 {
            return Err(Error::Config(format!("ode max_depth {} exceeds 30", self.max_depth)));
        }
        if let Some(w) = self.panel_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Config(format!("ode panel width {w} must be positive")));
            }
        }
        self.rs.validate()
    }
}

#[derive(Clone, Debug)]
struct Panel {
    a: f64,
    b: f64,
    /// φ₁(a) in double-double.
    base: Dd,
    /// Chebyshev coefficients of the interpolant of Z̃² on [a, b].
    coef: Vec<f64>,
    /// Coefficients of its antiderivative, zero at a, scaled to t.
    integral: Vec<f64>,
}

struct Fit {
    coef: Vec<f64>,
    integral: Vec<f64>,
    accepted: bool,
}

#[derive(Clone, Debug)]
pub struct OdeLadder {
    anchor: (f64, f64),
    range: (f64, f64),
    panels: Vec<Panel>,
    unconverged: Vec<Interval>,
    evaluations: usize,
    spec: OdeSpec,
}

/// Σ c_k T_k(x) by Clenshaw's recurrence.
fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

/// Coefficients of the degree-n interpolant through f at x_j = cos(πj/n).
fn cheb_coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    let mut a = vec![0.0; n + 1];
    for (k, ak) in a.iter_mut().enumerate() {
        let mut s = CompensatedSum::new();
        for (j, &v) in values.iter().enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            // cos(πjk/n) with the argument reduced exactly in integers
            let m = (j * k) % (2 * n);
            s.add(w * v * (std::f64::consts::PI * m as f64 / n as f64).cos());
        }
        *ak = 2.0 * s.value() / n as f64;
    }
    a[0] *= 0.5;
    a[n] *= 0.5;
    a
}

/// Antiderivative coefficients on [−1, 1], zero at −1, times `scale`.
fn cheb_integral(a: &[f64], scale: f64) -> Vec<f64> {
    let n = a.len() - 1;
    let at = |k: usize| if k <= n { a[k] } else { 0.0 };
    let mut big = vec![0.0; n + 2];
    big[1] = a[0] - 0.5 * at(2);
    for k in 2..=n + 1 {
        big[k] = (at(k - 1) - at(k + 1)) / (2.0 * k as f64);
    }
    let mut s = CompensatedSum::new();
    for (k, &v) in big.iter().enumerate().skip(1) {
        s.add(if k % 2 == 1 { v } else { -v });
    }
    big[0] = s.value();
    big.iter().map(|v| v * scale).collect()
}

fn fit_panel(a: f64, b: f64, spec: &OdeSpec) -> Fit {
    let n = spec.degree;
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let values: Vec<f64> = (0..=n)
        .map(|j| {
            let x = (std::f64::consts::PI * j as f64 / n as f64).cos();
            let t = if j == 0 { b } else if j == n { a } else { mid + half * x };
            z_tilde_sq_unchecked(t, spec.ln_mode, &spec.rs)
        })
        .collect();
    let coef = cheb_coefficients(&values);
    let scale = coef.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let tail = coef[n - 2..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let integral = cheb_integral(&coef, half);
    let floor = f64::EPSILON * b * (b / (2.0 * std::f64::consts::PI)).ln();
    Fit {
        coef,
        integral,
        accepted: tail <= (spec.coef_tol + floor) * scale,
    }
}

/// Model of φ₁ on [anchor_t, anchor_t + span] with φ₁' = Z̃², anchored at
/// `seed.eval(anchor_t)`.
pub fn ladder_ode(anchor_t: f64, span: f64, seed: &dyn LadderModel) -> Result<OdeLadder> {
    OdeLadder::build(anchor_t, span, seed, OdeSpec::default())
}

impl OdeLadder {
    pub fn build(anchor_t: f64, span: f64, seed: &dyn LadderModel, spec: OdeSpec) -> Result<Self> {
        spec.validate()?;
        if !(anchor_t >= T_MIN) || !anchor_t.is_finite() {
            return Err(Error::Domain {
                what: "ladder_ode anchor",
                value: anchor_t,
                domain: "t >= 100",
            });
        }
        if !(span > 0.0 && (anchor_t + span).is_finite()) {
            return Err(Error::Domain {
                what: "ladder_ode span",
                value: span,
                domain: "span > 0",
            });
        }
        let phi0 = seed.eval(anchor_t)?;
        let end = anchor_t + span;
        let width = spec.panel_width.unwrap_or_else(|| mean_zero_gap(anchor_t));
        let count = (span / width).ceil().max(1.0) as usize;
        let mut todo: Vec<(f64, f64, u32)> = (0..count)
            .map(|i| {
                let a = anchor_t + span * i as f64 / count as f64;
                let b = if i + 1 == count { end } else { anchor_t + span * (i + 1) as f64 / count as f64 };
                (a, b, 0)
            })
            .collect();

        // Panels are refined round by round; order is kept so the result
        // does not depend on the thread count.
        let mut done: Vec<(f64, f64, Fit, bool)> = Vec::new();
        let mut evaluations = 0;
        while !todo.is_empty() {
            let fits: Vec<Fit> = todo.par_iter().map(|&(a, b, _)| fit_panel(a, b, &spec)).collect();
            evaluations += fits.len() * (spec.degree + 1);
            let mut next = Vec::new();
            for ((a, b, depth), fit) in todo.into_iter().zip(fits) {
                if fit.accepted || depth >= spec.max_depth {
                    let ok = fit.accepted;
                    done.push((a, b, fit, ok));
                } else {
                    let m = 0.5 * (a + b);
                    next.push((a, m, depth + 1));
                    next.push((m, b, depth + 1));
                }
            }
            todo = next;
        }
        done.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut base = Dd::from_f64(phi0);
        let mut panels = Vec::with_capacity(done.len());
        let mut unconverged = Vec::new();
        for (a, b, fit, ok) in done {
            if !ok {
                unconverged.push(Interval::new(a, b));
            }
            let inc = fit.integral.iter().sum::<f64>();
            panels.push(Panel {
                a,
                b,
                base,
                coef: fit.coef,
                integral: fit.integral,
            });
            base = base.add_f64(inc);
        }
        Ok(OdeLadder {
            anchor: (anchor_t, phi0),
            range: (anchor_t, end),
            panels,
            unconverged,
            evaluations,
            spec,
        })
    }

    pub fn spec(&self) -> &OdeSpec {
        &self.spec
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Panels whose interpolant did not settle at the maximum depth.
    pub fn unconverged(&self) -> &[Interval] {
        &self.unconverged
    }

    /// Z̃² evaluations spent on construction.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn locate(&self, t: f64) -> (&Panel, f64) {
        let i = self.panels.partition_point(|p| p.a <= t).saturating_sub(1);
        let p = &self.panels[i];
        let x = ((2.0 * t - p.a - p.b) / (p.b - p.a)).clamp(-1.0, 1.0);
        (p, x)
    }
}

impl LadderModel for OdeLadder {
    fn kind(&self) -> LadderKind {
        LadderKind::Ode
    }

    fn range(&self) -> (f64, f64) {
        self.range
    }

    fn eval(&self, t: f64) -> Result<f64> {
        check_range(t, self.range, "ode ladder")?;
        let (p, x) = self.locate(t);
        Ok(p.base.add_f64(clenshaw(&p.integral, x)).to_f64())
    }

    fn deriv(&self, t: f64) -> Result<f64> {
        check_range(t, self.range, "ode ladder")?;
        Ok(z_tilde_sq_unchecked(t, self.spec.ln_mode, &self.spec.rs))
    }

    fn slope(&self, t: f64) -> Result<f64> {
        check_range(t, self.range, "ode ladder")?;
        let (p, x) = self.locate(t);
        Ok(clenshaw(&p.coef, x))
    }

    fn anchor(&self) -> Option<(f64, f64)> {
        Some(self.anchor)
    }
}
