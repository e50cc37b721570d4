//! Least-squares fits of `y ≍ x^p · (log 1/x)^q` as `x → 0`, with `p` real
//! and `q` a small non-negative integer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("abscissae must lie in (0, 1) and ordinates be positive and finite (point {0})")]
    BadPoint(usize),
    #[error("grid spans {0:.2} decades; at least {1} are required")]
    NarrowGrid(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLogFit {
    pub power: f64,
    pub logpow: u32,
    pub intercept: f64,
    /// Weighted root-mean-square residual of the selected model.
    pub residual: f64,
    /// Residual of the best fit for each candidate `q = 0, 1, …`.
    pub residual_by_logpow: Vec<f64>,
    /// Power fitted with each candidate `q`.
    pub power_by_logpow: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub min_points: usize,
    pub min_decades: f64,
    pub max_logpow: u32,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { min_points: 6, min_decades: 2.0, max_logpow: 0 }
    }
}

/// Fits `ln y = p ln x + q ln ln(1/x) + c` for each admissible `q` and keeps
/// the one with the smallest weighted residual. `weights` are inverse
/// variances of `ln y` (uniform when absent).
pub fn fit_power_log(
    x: &[f64],
    y: &[f64],
    weights: Option<&[f64]>,
    options: &FitOptions,
) -> Result<PowerLogFit, FitError> {
    let n = x.len();
    assert_eq!(n, y.len());
    if n < options.min_points.max(3) {
        return Err(FitError::TooFewPoints { needed: options.min_points.max(3), got: n });
    }
    for i in 0..n {
        if !(x[i] > 0.0 && x[i] < 1.0 && y[i] > 0.0 && y[i].is_finite()) {
            return Err(FitError::BadPoint(i));
        }
    }
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(0.0, f64::max);
    let decades = (hi / lo).log10();
    if decades + 1e-9 < options.min_decades {
        return Err(FitError::NarrowGrid(decades, options.min_decades));
    }
    let uniform = vec![1.0; n];
    let w = weights.unwrap_or(&uniform);
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let llx: Vec<f64> = x.iter().map(|v| (-v.ln()).ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();

    let mut residual_by_logpow = Vec::new();
    let mut power_by_logpow = Vec::new();
    let mut best: Option<(u32, f64, f64, f64)> = None;
    for q in 0..=options.max_logpow {
        let target: Vec<f64> = (0..n).map(|i| ly[i] - q as f64 * llx[i]).collect();
        let (p, c) = weighted_line(&lx, &target, w);
        let sw: f64 = w.iter().sum();
        let rss: f64 = (0..n).map(|i| w[i] * (target[i] - p * lx[i] - c).powi(2)).sum();
        let rms = (rss / sw).sqrt();
        residual_by_logpow.push(rms);
        power_by_logpow.push(p);
        if best.is_none_or(|b| rms < b.3) {
            best = Some((q, p, c, rms));
        }
    }
    let (logpow, power, intercept, residual) = best.unwrap();
    Ok(PowerLogFit { power, logpow, intercept, residual, residual_by_logpow, power_by_logpow })
}

fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxy: f64 = (0..x.len()).map(|i| w[i] * (x[i] - mx) * (y[i] - my)).sum();
    let sxx: f64 = (0..x.len()).map(|i| w[i] * (x[i] - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (4..=14).map(|k| 2f64.powi(-k)).collect()
    }

    fn opts(q: u32) -> FitOptions {
        FitOptions { max_logpow: q, ..Default::default() }
    }

    #[test]
    fn pure_power() {
        let x = grid();
        let y: Vec<f64> = x.iter().map(|r| std::f64::consts::PI * r * r).collect();
        let f = fit_power_log(&x, &y, None, &opts(1)).unwrap();
        assert_eq!(f.logpow, 0);
        assert!((f.power - 2.0).abs() < 1e-9);
    }

    #[test]
    fn power_with_log() {
        // (2π)²(r²/4 + (r²/2) ln(1/r))
        let x = grid();
        let c = 4.0 * std::f64::consts::PI.powi(2);
        let y: Vec<f64> = x.iter().map(|r| c * (r * r / 4.0 + r * r / 2.0 * (1.0 / r).ln())).collect();
        let f = fit_power_log(&x, &y, None, &opts(1)).unwrap();
        assert_eq!(f.logpow, 1);
        assert!((f.power - 2.0).abs() < 0.05);
    }

    #[test]
    fn grid_checks() {
        let x = [0.1, 0.05, 0.02];
        assert!(matches!(
            fit_power_log(&x, &[1.0, 1.0, 1.0], None, &opts(0)),
            Err(FitError::TooFewPoints { .. })
        ));
        let x: Vec<f64> = (0..6).map(|k| 0.1 / (1.0 + k as f64)).collect();
        let y = vec![1.0; 6];
        assert!(matches!(fit_power_log(&x, &y, None, &opts(0)), Err(FitError::NarrowGrid(..))));
        let x = grid();
        let mut y: Vec<f64> = x.clone();
        y[3] = 0.0;
        assert_eq!(fit_power_log(&x, &y, None, &opts(0)), Err(FitError::BadPoint(3)));
    }
}
