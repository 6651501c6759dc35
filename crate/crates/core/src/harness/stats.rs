//! Small least-squares fits used by the experiments.

use crate::error::{Error, Result};
use crate::sum::compensated_sum;

fn check_len(xs: &[f64], ys: &[f64], min: usize) -> Result<()> {
    if xs.len() != ys.len() || xs.len() < min {
        return Err(Error::Precondition(format!(
            "fit needs at least {min} paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    Ok(())
}

/// A minimising Σ (y − A·g(x))².
pub fn ls_amplitude(xs: &[f64], ys: &[f64], g: impl Fn(f64) -> f64) -> Result<f64> {
    check_len(xs, ys, 1)?;
    let num = compensated_sum(xs.iter().zip(ys).map(|(&x, &y)| y * g(x)));
    let den = compensated_sum(xs.iter().map(|&x| g(x) * g(x)));
    if den == 0.0 {
        return Err(Error::Precondition("degenerate amplitude fit".into()));
    }
    Ok(num / den)
}

/// (slope, intercept) of the least-squares line.
pub fn ls_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    check_len(xs, ys, 2)?;
    let n = xs.len() as f64;
    let mx = compensated_sum(xs.iter().copied()) / n;
    let my = compensated_sum(ys.iter().copied()) / n;
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let sxx = compensated_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    if sxx == 0.0 {
        return Err(Error::Precondition("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fit y ≈ C·x^(−α) on positive data; returns (α, C).
pub fn power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    check_len(xs, ys, 2)?;
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::Precondition("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, icept) = ls_line(&lx, &ly)?;
    Ok((-slope, icept.exp()))
}

/// Root mean square of y − A·g(x).
pub fn residual_rms(xs: &[f64], ys: &[f64], a: f64, g: impl Fn(f64) -> f64) -> f64 {
    let ss = compensated_sum(xs.iter().zip(ys).map(|(&x, &y)| (y - a * g(x)).powi(2)));
    (ss / xs.len().max(1) as f64).sqrt()
}
