//! Splitting an interval collection by the sign of a function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::interval::{Interval, IntervalCollection, SetLabel};
use crate::error::{Error, Result};

/// Iteration cap for the search around a local minimum of |f|.
const MAX_REFINE: usize = 80;
/// A refined minimum below this fraction of its neighbours is reported.
const CLUSTER_RATIO: f64 = 1e-3;

/// Mean spacing of zeros of Z near height t, 2π / ln(t/2π).
pub fn mean_zero_gap(t: f64) -> f64 {
    2.0 * std::f64::consts::PI / (t / (2.0 * std::f64::consts::PI)).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignScan {
    /// Total root-gap budget as a fraction of the collection's measure.
    pub root_tol: f64,
    /// Uniform pre-scan step.
    pub scan_step: f64,
    /// Re-sample around local minima of |f| to catch close root pairs.
    pub refine_minima: bool,
}

impl SignScan {
    /// Scan step of one eighth of the mean zero gap at height t.
    pub fn for_height(t: f64, root_tol: f64) -> Self {
        SignScan {
            root_tol,
            scan_step: mean_zero_gap(t) / 8.0,
            refine_minima: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignPartition {
    pub pos: IntervalCollection,
    pub neg: IntervalCollection,
    /// Root-enclosing gaps removed from the collection.
    pub gaps: Vec<Interval>,
    /// Cells where |f| dips close to zero without a detected sign change.
    pub suspected_clusters: Vec<Interval>,
    /// Bound on the total gap measure: the requested share per root, or
    /// the spacing of doubles at the root where that is wider.
    pub gap_budget: f64,
    pub evaluations: usize,
}

impl SignPartition {
    pub fn gap_measure(&self) -> f64 {
        crate::sum::compensated_sum(self.gaps.iter().map(Interval::len))
    }
}

#[derive(Default)]
struct Scan {
    /// Sign-change brackets (a, b) with the sign of f at a.
    brackets: Vec<(f64, f64, bool)>,
    suspected: Vec<Interval>,
    first_positive: bool,
    evaluations: usize,
}

fn positive(v: f64) -> bool {
    v >= 0.0
}

fn scan_interval<F: Fn(f64) -> f64>(iv: &Interval, f: &F, spec: &SignScan) -> Scan {
    let n = ((iv.len() / spec.scan_step).ceil() as usize).max(2);
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { iv.hi } else { iv.lo + iv.len() * i as f64 / n as f64 })
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Scan {
        first_positive: positive(vs[0]),
        evaluations: vs.len(),
        ..Default::default()
    };
    for i in 0..n {
        if positive(vs[i]) != positive(vs[i + 1]) {
            out.brackets.push((xs[i], xs[i + 1], positive(vs[i])));
        } else if spec.refine_minima
            && i > 0
            && positive(vs[i - 1]) == positive(vs[i])
            && vs[i].abs() < vs[i - 1].abs()
            && vs[i].abs() < vs[i + 1].abs()
        {
            let s = if positive(vs[i]) { 1.0 } else { -1.0 };
            let scale = vs[i - 1].abs().min(vs[i + 1].abs());
            refine(xs[i - 1], xs[i], xs[i + 1], s, f, scale, &mut out);
        }
    }
    out.brackets.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.brackets.dedup_by(|b, a| a.0 == b.0 && a.1 == b.1);
    out
}

/// Golden-section search for the minimum of s·f on (a, b), where s is the
/// sign of f at the ends and `m` is an interior point below both ends.
/// A negative value exposes a pair of roots.
fn refine<F: Fn(f64) -> f64>(a: f64, m: f64, b: f64, s: f64, f: &F, scale: f64, out: &mut Scan) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let g = |x: f64| s * f(x);
    let (mut lo, mut hi) = (a, b);
    let mut x = m;
    let mut gx = g(m);
    out.evaluations += 1;
    for _ in 0..MAX_REFINE {
        if gx < 0.0 {
            out.brackets.push((a, x, s > 0.0));
            out.brackets.push((x, b, s < 0.0));
            return;
        }
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
        // probe the larger side
        let u = if x - lo > hi - x { x - (1.0 - INV_PHI) * (x - lo) } else { x + (1.0 - INV_PHI) * (hi - x) };
        let gu = g(u);
        out.evaluations += 1;
        if gu < gx {
            if u < x { hi = x } else { lo = x }
            x = u;
            gx = gu;
        } else if u < x {
            lo = u;
        } else {
            hi = u;
        }
    }
    if gx < CLUSTER_RATIO * scale {
        out.suspected.push(Interval::new(a, b));
    }
}

/// Bisect (a, b) until narrower than `width`, keeping the sign change.
fn bisect<F: Fn(f64) -> f64>(mut a: f64, mut b: f64, left_pos: bool, f: &F, width: f64, evals: &mut usize) -> (f64, f64) {
    while b - a > width {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        *evals += 1;
        if positive(f(m)) == left_pos {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// Split `c` into the parts where f > 0 and f < 0, cutting out one small
/// gap around each located root. The gaps total at most
/// `root_tol · measure(c)` unless a root can only be bracketed by two
/// adjacent doubles further apart than its share (`gap_budget`).
pub fn sign_partition<F>(c: &IntervalCollection, f: F, spec: &SignScan) -> Result<SignPartition>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(spec.root_tol > 0.0 && spec.root_tol < 1.0) {
        return Err(Error::Config(format!("root_tol {} must lie in (0, 1)", spec.root_tol)));
    }
    if !(spec.scan_step > 0.0) {
        return Err(Error::Config(format!("scan step {} must be positive", spec.scan_step)));
    }
    let scans: Vec<Scan> = c.intervals().par_iter().map(|iv| scan_interval(iv, &f, spec)).collect();
    let n_roots: usize = scans.iter().map(|s| s.brackets.len()).sum();
    let width = if n_roots > 0 {
        spec.root_tol * c.measure() / n_roots as f64
    } else {
        0.0
    };

    let pieces: Vec<(Vec<Interval>, Vec<Interval>, Vec<Interval>, usize)> = c
        .intervals()
        .par_iter()
        .zip(&scans)
        .map(|(iv, scan)| {
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut gaps = Vec::new();
            let mut evals = 0;
            let mut cursor = iv.lo;
            let mut sign = scan.first_positive;
            for &(a, b, left_pos) in &scan.brackets {
                let (ga, gb) = bisect(a.max(cursor), b, left_pos, &f, width, &mut evals);
                if ga > cursor {
                    let piece = Interval::new(cursor, ga);
                    if left_pos { pos.push(piece) } else { neg.push(piece) }
                }
                gaps.push(Interval::new(ga, gb));
                cursor = gb;
                sign = !left_pos;
            }
            if iv.hi > cursor {
                let piece = Interval::new(cursor, iv.hi);
                if sign { pos.push(piece) } else { neg.push(piece) }
            }
            (pos, neg, gaps, evals)
        })
        .collect();

    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut gaps = Vec::new();
    let mut evaluations: usize = scans.iter().map(|s| s.evaluations).sum();
    for (p, n, g, e) in pieces {
        pos.extend(p);
        neg.extend(n);
        gaps.extend(g);
        evaluations += e;
    }
    let suspected_clusters = scans.into_iter().flat_map(|s| s.suspected).collect();
    let gap_budget = crate::sum::compensated_sum(gaps.iter().map(|g: &Interval| width.max(2.0 * ulp(g.hi))));
    Ok(SignPartition {
        pos: IntervalCollection::new(pos, SetLabel::PosPart, c.window())?,
        neg: IntervalCollection::new(neg, SetLabel::NegPart, c.window())?,
        gaps,
        suspected_clusters,
        gap_budget,
        evaluations,
    })
}

/// Distance from |x| to the next larger double.
fn ulp(x: f64) -> f64 {
    let a = x.abs();
    f64::from_bits(a.to_bits() + 1) - a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coll(ivs: &[(f64, f64)]) -> IntervalCollection {
        let v = ivs.iter().map(|&(a, b)| Interval::new(a, b)).collect();
        IntervalCollection::new(v, SetLabel::Other, (0.0, 100.0)).unwrap()
    }

    #[test]
    fn constant_sign() {
        let c = coll(&[(1.0, 2.0), (3.0, 5.0)]);
        let spec = SignScan { root_tol: 1e-6, scan_step: 0.1, refine_minima: true };
        let p = sign_partition(&c, |_| 1.0, &spec).unwrap();
        assert_eq!(p.pos.intervals(), c.intervals());
        assert!(p.neg.is_empty());
        assert!(p.gaps.is_empty());
    }

    #[test]
    fn sine_roots_are_enclosed() {
        let c = coll(&[(0.5, 10.0)]);
        let spec = SignScan { root_tol: 1e-9, scan_step: 0.05, refine_minima: true };
        let p = sign_partition(&c, f64::sin, &spec).unwrap();
        assert_eq!(p.gaps.len(), 3);
        for (g, k) in p.gaps.iter().zip(1..) {
            let r = k as f64 * std::f64::consts::PI;
            assert!(g.lo <= r && r <= g.hi);
        }
        let total = p.pos.measure() + p.neg.measure() + p.gap_measure();
        assert!((total - c.measure()).abs() < 1e-12);
        assert!(p.gap_measure() <= 1e-9 * c.measure());
        assert!(p.gap_measure() <= p.gap_budget);
        for iv in p.pos.intervals() {
            assert!(iv.len() > 0.0 && (0.5 * (iv.lo + iv.hi)).sin() > 0.0);
        }
    }

    #[test]
    fn close_root_pair_found_by_refinement() {
        // roots at 2.000 and 2.001, far below the scan step
        let f = |x: f64| (x - 2.0) * (x - 2.001);
        let c = coll(&[(0.0, 4.0)]);
        let coarse = SignScan { root_tol: 1e-8, scan_step: 0.3, refine_minima: false };
        assert!(sign_partition(&c, f, &coarse).unwrap().neg.is_empty());
        let spec = SignScan { refine_minima: true, ..coarse };
        let p = sign_partition(&c, f, &spec).unwrap();
        assert_eq!(p.gaps.len(), 2);
        assert_eq!(p.neg.len(), 1);
        assert!((p.neg.measure() - 0.001).abs() < 1e-6);
    }

    #[test]
    fn touching_zero_is_reported() {
        let f = |x: f64| (x - 2.0).powi(2);
        let c = coll(&[(0.0, 4.0)]);
        let spec = SignScan { root_tol: 1e-8, scan_step: 0.3, refine_minima: true };
        let p = sign_partition(&c, f, &spec).unwrap();
        assert!(p.neg.is_empty());
        assert_eq!(p.suspected_clusters.len(), 1);
    }

    #[test]
    fn bad_parameters() {
        let c = coll(&[(0.0, 1.0)]);
        let spec = SignScan { root_tol: 0.0, scan_step: 0.1, refine_minima: false };
        assert!(sign_partition(&c, f64::sin, &spec).is_err());
    }
}
