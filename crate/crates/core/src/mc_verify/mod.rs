//! Monte-Carlo and closed-form checks of the predicted asymptotic laws.
//!
//! Sublevel volumes `Vol{z ∈ U′ : |F(z) − F(ζ)| < r}` are estimated by seeded
//! importance sampling over a polydisc box; one sample stream serves every
//! radius of a grid. [`fit_asymptotics`] then extracts `(p̂, q̂)` from
//! `V(r) ≍ r^p |log r|^q`. [`kernel_bound_check`] turns volumes (or, for a
//! planar non-Reinhardt slice, conformal radii) into kernel exponents.

mod kernel;
mod planar;
mod volume;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use thiserror::Error;

use crate::fit::{fit_power_log, FitError, FitOptions};
use crate::polyparse::{recenter, SparsePolynomial};
use crate::scalar::Scalar;

pub use kernel::{
    kernel_bound_check, AlternativeLaw, KernelCheckConfig, KernelCheckReport, KernelModel,
    VolumeBoundCheck,
};
pub use planar::{conformal_radius, ConformalRadius, PlanarSeries};
pub use volume::{estimate_volume, estimate_volumes};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("at least 10000 samples are required, got {0}")]
    TooFewSamples(u64),
    #[error("radii must be positive and strictly decreasing")]
    BadRadii,
    #[error("box radius must be positive and finite")]
    BadBox,
    #[error("base point has {got} coordinates, the map has {expected}")]
    BasePointDimension { expected: usize, got: usize },
    #[error("the map is constant")]
    ConstantMap,
    #[error("radius {0:e} is under-resolved ({1} hits); raise --samples or --rmin")]
    Unresolved(f64, u64),
    #[error("{0}; use at least 6 radii spanning 2 decades, e.g. --rmax 0.0625 --rmin 6.1e-5")]
    Fit(#[from] FitError),
    #[error("model is not rotationally symmetric: {0}")]
    NotReinhardt(String),
    #[error("sublevel sets of this series are unbounded")]
    Unbounded,
    #[error("invalid model: {0}")]
    BadModel(String),
    #[error(transparent)]
    Exponents(#[from] crate::exponents::ExponentError),
}

/// A non-negative function on `ℂⁿ` whose sublevel sets are sampled.
pub trait SublevelFunction: Sync {
    fn dim(&self) -> usize;
    fn value(&self, z: &[Complex64]) -> f64;
}

/// A monomial term compiled to floating point.
#[derive(Debug, Clone)]
struct CompiledTerm {
    exponents: Vec<u32>,
    coefficient: Complex64,
}

fn compile(f: &SparsePolynomial) -> Vec<CompiledTerm> {
    f.terms()
        .map(|(e, c)| CompiledTerm { exponents: e.0.clone(), coefficient: c.to_complex() })
        .collect()
}

fn eval_compiled(terms: &[CompiledTerm], z: &[Complex64]) -> Complex64 {
    terms
        .iter()
        .map(|t| {
            t.exponents
                .iter()
                .zip(z)
                .filter(|(&k, _)| k > 0)
                .fold(t.coefficient, |acc, (&k, zk)| acc * zk.powu(k))
        })
        .sum()
}

/// `z ↦ |F(ζ + z) − F(ζ)|`, so the sampling box is centred at `ζ`.
#[derive(Debug, Clone)]
pub struct MapDeviation {
    dim: usize,
    components: Vec<Vec<CompiledTerm>>,
}

impl MapDeviation {
    pub fn new(map: &[SparsePolynomial], base_point: &[Scalar]) -> Result<Self, VerifyError> {
        let dim = map.first().map(|f| f.dim()).ok_or(VerifyError::ConstantMap)?;
        if base_point.len() != dim {
            return Err(VerifyError::BasePointDimension { expected: dim, got: base_point.len() });
        }
        let shifted = recenter(map, base_point);
        if shifted.iter().all(|f| f.is_zero()) {
            return Err(VerifyError::ConstantMap);
        }
        Ok(Self { dim, components: shifted.iter().map(compile).collect() })
    }

    pub fn at_origin(map: &[SparsePolynomial]) -> Result<Self, VerifyError> {
        let dim = map.first().map(|f| f.dim()).ok_or(VerifyError::ConstantMap)?;
        Self::new(map, &vec![Scalar::zero(); dim])
    }
}

impl SublevelFunction for MapDeviation {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, z: &[Complex64]) -> f64 {
        self.components
            .iter()
            .map(|c| eval_compiled(c, z).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `ρ(z) = (Σ |z_j|^{2a_j})^p`, a complete Reinhardt model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReinhardtModel {
    pub exponents: Vec<u32>,
    pub power: f64,
}

impl ReinhardtModel {
    pub fn new(exponents: Vec<u32>, power: f64) -> Result<Self, VerifyError> {
        if exponents.is_empty() || exponents.contains(&0) {
            return Err(VerifyError::BadModel("exponents must be positive integers".into()));
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(VerifyError::BadModel("power must be positive".into()));
        }
        Ok(Self { exponents, power })
    }

    /// `c₀(ρ) = Σ(1/a_j) / (2p)`.
    pub fn c0(&self) -> f64 {
        self.exponents.iter().map(|&a| 1.0 / a as f64).sum::<f64>() / (2.0 * self.power)
    }

    /// Exact `Vol{ρ < t}`.
    pub fn volume_exact(&self, t: f64) -> f64 {
        reinhardt_volume_exact(&self.exponents, t.powf(1.0 / self.power))
    }
}

impl SublevelFunction for ReinhardtModel {
    fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn value(&self, z: &[Complex64]) -> f64 {
        let s: f64 = self
            .exponents
            .iter()
            .zip(z)
            .map(|(&a, zj)| zj.norm_sqr().powi(a as i32))
            .sum();
        s.powf(self.power)
    }
}

/// `Vol{Σ|z_j|^{2a_j} < t} = t^{Σ1/a_j} πⁿ ∏Γ(1 + 1/a_j) / Γ(1 + Σ1/a_j)`.
pub fn reinhardt_volume_exact(exponents: &[u32], t: f64) -> f64 {
    let s: f64 = exponents.iter().map(|&a| 1.0 / a as f64).sum();
    let prod: f64 = exponents.iter().map(|&a| gamma(1.0 + 1.0 / a as f64)).product();
    t.powf(s) * std::f64::consts::PI.powi(exponents.len() as i32) * prod / gamma(1.0 + s)
}

/// Sampling parameters shared by every Monte-Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Radius of the polydisc box around the base point.
    pub box_radius: f64,
    /// Lower end of the log-radial sampling component; defaults to
    /// `r_min / 16` (clamped to `1e-12`) times the box radius.
    pub inner_radius: Option<f64>,
    /// Hits needed for an estimate to count as resolved.
    pub min_hits: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { samples: 1_000_000, seed: 0x5eed, box_radius: 1.0, inner_radius: None, min_hits: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub r: f64,
    pub volume: f64,
    pub stderr: f64,
    pub hits: u64,
    pub resolved: bool,
}

/// `count` radii from `r_max` down to `r_min`, geometrically spaced.
pub fn radius_grid(r_max: f64, r_min: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && r_max > r_min && r_min > 0.0);
    let ratio = (r_min / r_max).ln() / (count - 1) as f64;
    (0..count).map(|k| r_max * (ratio * k as f64).exp()).collect()
}

/// `r = 2^{−k}`, `k = 4…14`.
pub fn default_radius_grid() -> Vec<f64> {
    (4..=14).map(|k| 2f64.powi(-k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeFit {
    pub r_grid: Vec<f64>,
    pub estimates: Vec<VolumeEstimate>,
    pub power: f64,
    pub logpow: u32,
    pub residual: f64,
    pub residual_by_logpow: Vec<f64>,
    pub power_by_logpow: Vec<f64>,
    pub seed: u64,
}

/// Fits `log V = p log r + q log log(1/r) + c` with `q ∈ {0, …, max_logpow}`,
/// weighting each point by the inverse variance of `log V`.
pub fn fit_asymptotics(
    estimates: &[VolumeEstimate],
    max_logpow: u32,
    seed: u64,
) -> Result<VolumeFit, VerifyError> {
    if let Some(e) = estimates.iter().find(|e| !e.resolved) {
        return Err(VerifyError::Unresolved(e.r, e.hits));
    }
    let r: Vec<f64> = estimates.iter().map(|e| e.r).collect();
    let v: Vec<f64> = estimates.iter().map(|e| e.volume).collect();
    let w: Vec<f64> = estimates
        .iter()
        .map(|e| (e.volume / e.stderr.max(1e-12 * e.volume)).powi(2))
        .collect();
    let opts = FitOptions { max_logpow, ..Default::default() };
    let fit = fit_power_log(&r, &v, Some(&w), &opts)?;
    Ok(VolumeFit {
        r_grid: r,
        estimates: estimates.to_vec(),
        power: fit.power,
        logpow: fit.logpow,
        residual: fit.residual,
        residual_by_logpow: fit.residual_by_logpow,
        power_by_logpow: fit.power_by_logpow,
        seed,
    })
}

/// Estimates and fits the volume law of `|F − F(ζ)|` over `radii`;
/// `q̂` ranges over `0…n−1`.
pub fn verify_volume_law(
    map: &[SparsePolynomial],
    base_point: &[Scalar],
    radii: &[f64],
    config: &McConfig,
) -> Result<VolumeFit, VerifyError> {
    let f = MapDeviation::new(map, base_point)?;
    let estimates = estimate_volumes(&f, radii, config)?;
    fit_asymptotics(&estimates, f.dim().saturating_sub(1) as u32, config.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyparse::parse_poly;
    use std::f64::consts::PI;

    fn map(text: &str, n: usize) -> Vec<SparsePolynomial> {
        vec![parse_poly(text, n).unwrap()]
    }

    fn cfg(samples: u64) -> McConfig {
        McConfig { samples, seed: 11, ..Default::default() }
    }

    fn within_3_sigma(e: &VolumeEstimate, exact: f64) {
        assert!(
            (e.volume - exact).abs() <= 3.0 * e.stderr,
            "estimate {} ± {} vs {exact}",
            e.volume,
            e.stderr
        );
    }

    #[test]
    fn exact_volumes() {
        assert!((reinhardt_volume_exact(&[1], 1.0) - PI).abs() < 1e-12);
        assert!((reinhardt_volume_exact(&[1, 1], 1.0) - PI * PI / 2.0).abs() < 1e-12);
        assert!((reinhardt_volume_exact(&[1, 2], 1.0) - 2.0 * PI * PI / 3.0).abs() < 1e-12);
        let m = ReinhardtModel::new(vec![1, 2], 0.5).unwrap();
        assert!((m.volume_exact(0.1) - 2.0 * PI * PI / 3.0 * 1e-3).abs() < 1e-15);
        assert_eq!(m.c0(), 1.5);
    }

    #[test]
    fn disc_area() {
        let f = MapDeviation::at_origin(&map("z1", 1)).unwrap();
        within_3_sigma(&estimate_volume(&f, 0.5, &cfg(200_000)).unwrap(), PI * 0.25);
    }

    #[test]
    fn product_volume() {
        let f = MapDeviation::at_origin(&map("z1*z2", 2)).unwrap();
        let r: f64 = 0.1;
        let exact = 4.0 * PI * PI * (r * r / 4.0 + r * r / 2.0 * (1.0 / r).ln());
        assert!((exact - 0.5533).abs() < 1e-4);
        within_3_sigma(&estimate_volume(&f, r, &cfg(400_000)).unwrap(), exact);
    }

    #[test]
    fn square_volume() {
        let f = MapDeviation::at_origin(&map("z1^2", 1)).unwrap();
        within_3_sigma(&estimate_volume(&f, 0.25, &cfg(200_000)).unwrap(), PI * 0.25);
    }

    #[test]
    fn shifted_base_point() {
        // |(1+z)² − 1| < r near z = 0 is, to first order, |2z| < r
        let f = MapDeviation::new(&map("z1^2", 1), &[Scalar::one()]).unwrap();
        let e = estimate_volume(&f, 1e-3, &cfg(200_000)).unwrap();
        let approx = PI * 0.25e-6;
        assert!((e.volume / approx - 1.0).abs() < 0.05);
    }

    #[test]
    fn reinhardt_against_closed_form() {
        let m = ReinhardtModel::new(vec![1, 2], 0.5).unwrap();
        for t in [0.5, 0.1, 0.01] {
            within_3_sigma(&estimate_volume(&m, t, &cfg(200_000)).unwrap(), m.volume_exact(t));
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let f = MapDeviation::at_origin(&map("z1*z2 + z2^3", 2)).unwrap();
        let radii = default_radius_grid();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_volumes(&f, &radii, &cfg(100_000)).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn nested_estimates_are_monotone() {
        let f = MapDeviation::at_origin(&map("z1^2 + z2^3", 2)).unwrap();
        let est = estimate_volumes(&f, &default_radius_grid(), &cfg(100_000)).unwrap();
        assert!(est.windows(2).all(|w| w[0].volume >= w[1].volume));
    }

    #[test]
    fn siegel_volume_fit() {
        let f = MapDeviation::at_origin(&map("z1", 1)).unwrap();
        let est = estimate_volumes(&f, &default_radius_grid(), &cfg(200_000)).unwrap();
        let fit = fit_asymptotics(&est, 0, 1).unwrap();
        assert!((fit.power - 2.0).abs() < 0.05, "{}", fit.power);
        assert_eq!(fit.logpow, 0);
    }

    #[test]
    fn unresolved_and_input_errors() {
        let f = MapDeviation::at_origin(&map("z1^8", 1)).unwrap();
        assert!(matches!(estimate_volume(&f, 0.5, &cfg(100)), Err(VerifyError::TooFewSamples(_))));
        assert!(matches!(
            estimate_volumes(&f, &[0.1, 0.2], &cfg(20_000)),
            Err(VerifyError::BadRadii)
        ));
        let est = vec![VolumeEstimate { r: 0.1, volume: 0.0, stderr: 0.0, hits: 0, resolved: false }];
        assert!(matches!(fit_asymptotics(&est, 0, 0), Err(VerifyError::Unresolved(..))));
        assert!(matches!(
            MapDeviation::new(&map("z1", 1), &[]),
            Err(VerifyError::BasePointDimension { .. })
        ));
    }

    #[test]
    fn radius_grids() {
        let g = radius_grid(0.1, 1e-4, 4);
        assert!((g[1] - 1e-2).abs() < 1e-15 && (g[3] - 1e-4).abs() < 1e-16);
        assert_eq!(default_radius_grid().len(), 11);
    }
}
