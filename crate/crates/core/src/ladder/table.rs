//! Checkpoint tables (t, φ₁, φ₁') with monotone cubic interpolation.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_range, LadderKind, LadderModel};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Row {
    t: f64,
    phi: f64,
    dphi: f64,
}

/// Piecewise cubic Hermite model through tabulated checkpoints. Slopes
/// are limited (Fritsch–Carlson) so the interpolant is monotone.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedLadder {
    source: LadderKind,
    anchor: Option<(f64, f64)>,
    tolerance: f64,
    t: Vec<f64>,
    phi: Vec<f64>,
    /// Derivatives as tabulated.
    dphi: Vec<f64>,
    /// Derivatives used by the interpolant.
    slopes: Vec<f64>,
}

fn limit_slopes(t: &[f64], phi: &[f64], d: &[f64]) -> Vec<f64> {
    let mut m: Vec<f64> = d.iter().map(|v| v.max(0.0)).collect();
    for k in 0..t.len() - 1 {
        let delta = (phi[k + 1] - phi[k]) / (t[k + 1] - t[k]);
        if delta <= 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let (a, b) = (m[k] / delta, m[k + 1] / delta);
        let r = a * a + b * b;
        if r > 9.0 {
            let s = 3.0 / r.sqrt();
            m[k] = s * a * delta;
            m[k + 1] = s * b * delta;
        }
    }
    m
}

impl TabulatedLadder {
    pub fn new(
        source: LadderKind,
        anchor: Option<(f64, f64)>,
        t: Vec<f64>,
        phi: Vec<f64>,
        dphi: Vec<f64>,
    ) -> Result<Self> {
        if t.len() < 2 || t.len() != phi.len() || t.len() != dphi.len() {
            return Err(Error::Precondition(format!(
                "checkpoint table needs at least two rows of equal length, got {}/{}/{}",
                t.len(),
                phi.len(),
                dphi.len()
            )));
        }
        for i in 0..t.len() {
            if !(t[i].is_finite() && phi[i].is_finite() && dphi[i].is_finite()) {
                return Err(Error::Precondition(format!("checkpoint row {i} is not finite")));
            }
            if i > 0 && !(t[i] > t[i - 1] && phi[i] >= phi[i - 1]) {
                return Err(Error::Precondition(format!("checkpoint row {i} breaks monotonicity")));
            }
        }
        let slopes = limit_slopes(&t, &phi, &dphi);
        Ok(TabulatedLadder {
            source,
            anchor,
            tolerance: 0.0,
            t,
            phi,
            dphi,
            slopes,
        })
    }

    /// Sample `m` at `n + 1` equally spaced points of its range. The
    /// recorded tolerance is the largest interpolation error seen at the
    /// midpoints between checkpoints.
    pub fn from_model(m: &dyn LadderModel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(crate::error::precondition("checkpoint count must be positive"));
        }
        let (a, b) = m.range();
        let ts: Vec<f64> = (0..=n)
            .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
            .collect();
        let rows: Vec<(f64, f64)> = ts
            .par_iter()
            .map(|&t| Ok((m.eval(t)?, m.deriv(t)?)))
            .collect::<Result<_>>()?;
        let (phi, dphi) = rows.into_iter().unzip();
        let mut table = Self::new(m.kind(), m.anchor(), ts, phi, dphi)?;
        let errs: Vec<f64> = table
            .t
            .par_windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                Ok((table.interpolate(mid).0 - m.eval(mid)?).abs())
            })
            .collect::<Result<_>>()?;
        table.tolerance = errs.into_iter().fold(0.0, f64::max);
        Ok(table)
    }

    pub fn source(&self) -> LadderKind {
        self.source
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn interpolate(&self, t: f64) -> (f64, f64) {
        let k = self.t.partition_point(|&x| x <= t).clamp(1, self.t.len() - 1) - 1;
        let h = self.t[k + 1] - self.t[k];
        let s = (t - self.t[k]) / h;
        let (p0, p1) = (self.phi[k], self.phi[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1;
        let d = (6.0 * s2 - 6.0 * s) * (p0 - p1) + (3.0 * s2 - 4.0 * s + 1.0) * m0 + (3.0 * s2 - 2.0 * s) * m1;
        (v, d / h)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let (at, ap) = self.anchor.unwrap_or((f64::NAN, f64::NAN));
        writeln!(
            out,
            "# kind={} anchor_t={at:?} anchor_phi={ap:?} tolerance={:?}",
            self.source, self.tolerance
        )?;
        let mut w = csv::Writer::from_writer(out);
        for i in 0..self.t.len() {
            w.serialize(Row {
                t: self.t[i],
                phi: self.phi[i],
                dphi: self.dphi[i],
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut header = String::new();
        input.read_line(&mut header)?;
        let header = header
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("checkpoint table must start with a '#' header".into()))?;
        let mut kind = None;
        let mut anchor = (f64::NAN, f64::NAN);
        let mut tolerance = None;
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            let num = || v.parse::<f64>().map_err(|e| Error::Parse(format!("{k}: {e}")));
            match k {
                "kind" => kind = Some(v.parse::<LadderKind>()?),
                "anchor_t" => anchor.0 = num()?,
                "anchor_phi" => anchor.1 = num()?,
                "tolerance" => tolerance = Some(num()?),
                _ => return Err(Error::Parse(format!("unknown header key {k:?}"))),
            }
        }
        let kind = kind.ok_or_else(|| Error::Parse("header lacks kind".into()))?;
        let tolerance = tolerance.ok_or_else(|| Error::Parse("header lacks tolerance".into()))?;
        let anchor = if anchor.0.is_nan() || anchor.1.is_nan() { None } else { Some(anchor) };
        let mut t = Vec::new();
        let mut phi = Vec::new();
        let mut dphi = Vec::new();
        for row in csv::Reader::from_reader(input).deserialize::<Row>() {
            let row = row?;
            t.push(row.t);
            phi.push(row.phi);
            dphi.push(row.dphi);
        }
        let mut table = Self::new(kind, anchor, t, phi, dphi)?;
        table.tolerance = tolerance;
        Ok(table)
    }
}

impl LadderModel for TabulatedLadder {
    fn kind(&self) -> LadderKind {
        LadderKind::Tabulated
    }

    fn range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    fn eval(&self, t: f64) -> Result<f64> {
        check_range(t, self.range(), "tabulated ladder")?;
        Ok(self.interpolate(t).0)
    }

    fn deriv(&self, t: f64) -> Result<f64> {
        check_range(t, self.range(), "tabulated ladder")?;
        Ok(self.interpolate(t).1)
    }

    fn anchor(&self) -> Option<(f64, f64)> {
        self.anchor
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{ladder_asymptotic, mirror_point};

    #[test]
    fn reproduces_smooth_model() {
        let m = ladder_asymptotic((1e4, 2e4)).unwrap();
        let tab = TabulatedLadder::from_model(&m, 200).unwrap();
        assert!(tab.tolerance() < 1e-6, "{}", tab.tolerance());
        for &t in &[1e4, 1.23456e4, 2e4] {
            assert!((tab.eval(t).unwrap() - m.eval(t).unwrap()).abs() <= tab.tolerance() + 1e-9);
        }
        let back = mirror_point(&tab, tab.eval(15_000.5).unwrap()).unwrap();
        assert!((back - 15_000.5).abs() < 1e-8 * 15_000.5);
    }

    #[test]
    fn csv_round_trip() {
        let m = ladder_asymptotic((1e4, 1.1e4)).unwrap();
        let tab = TabulatedLadder::from_model(&m, 10).unwrap();
        let mut buf = Vec::new();
        tab.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# kind=asymptotic anchor_t=NaN"));
        let back = TabulatedLadder::read_csv(&buf[..]).unwrap();
        assert_eq!(back, tab);
        assert!(TabulatedLadder::read_csv(&b"t,phi,dphi\n1,1,1\n"[..]).is_err());
    }

    #[test]
    fn monotone_despite_wild_slopes() {
        let t = vec![0.0, 1.0, 2.0, 3.0];
        let phi = vec![0.0, 1.0, 1.0, 2.0];
        let d = vec![5.0, 40.0, 0.0, -3.0];
        let tab = TabulatedLadder::new(LadderKind::Ode, None, t, phi, d).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=300 {
            let v = tab.eval(i as f64 / 100.0).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
        assert!(TabulatedLadder::new(LadderKind::Ode, None, vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    }
}
