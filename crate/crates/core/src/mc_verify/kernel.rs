use serde::{Deserialize, Serialize};

use super::planar::{conformal_radius, ConformalRadius, PlanarSeries};
use super::{
    estimate_volumes, fit_asymptotics, McConfig, ReinhardtModel, SublevelFunction, VerifyError,
    VolumeEstimate, VolumeFit,
};
use crate::exponents::{assemble_report, real_series_report};
use crate::fit::{fit_power_log, FitOptions};
use crate::polyparse::SparsePolynomial;
use crate::rational::to_f64;
use crate::scalar::Scalar;

/// A model domain whose slices `D_t = {ρ < t}` have a computable kernel at
/// the origin, so that `K_Ω((0, w)) ≍ (Im w)^{−2} K_{D_t}(0)` with `t = Im w`.
#[derive(Debug, Clone)]
pub enum KernelModel {
    /// `ρ = |F|²` for a single monomial `F`, sliced inside the sampling box.
    Monomial(SparsePolynomial),
    Reinhardt(ReinhardtModel),
    /// A planar real series; slices are not Reinhardt, and `K_{D_t}(0)` comes
    /// from the conformal radius instead of the volume.
    Planar(PlanarSeries),
}

impl KernelModel {
    pub fn monomial(map: &[SparsePolynomial]) -> Result<Self, VerifyError> {
        match map {
            [f] if f.num_terms() == 1 && f.vanishes_at_origin() => Ok(Self::Monomial(f.clone())),
            [_] => Err(VerifyError::NotReinhardt(
                "only a single monomial has rotationally symmetric slices".into(),
            )),
            _ => Err(VerifyError::NotReinhardt("maps with several components".into())),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Monomial(f) => format!("|{f}|^2"),
            Self::Reinhardt(m) => {
                let parts: Vec<String> = m
                    .exponents
                    .iter()
                    .enumerate()
                    .map(|(j, a)| format!("|z{}|^{}", j + 1, 2 * a))
                    .collect();
                format!("({})^{}", parts.join(" + "), m.power)
            }
            Self::Planar(s) => s.series().to_string(),
        }
    }

    fn default_thresholds(&self) -> Vec<f64> {
        match self {
            // t = r² over the default radius grid
            Self::Monomial(_) => (4..=14).map(|k| 2f64.powi(-2 * k)).collect(),
            Self::Reinhardt(_) => (4..=14).map(|k| 2f64.powi(-k)).collect(),
            Self::Planar(_) => (4..=10).map(|k| 10f64.powi(-k)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCheckConfig {
    /// Strictly decreasing values of `t = Im w`; empty selects a default.
    pub thresholds: Vec<f64>,
    pub mc: McConfig,
    /// Walks per threshold for the conformal radius of planar slices.
    pub walks: u64,
    /// Allowed gap between fitted and predicted kernel powers.
    pub tolerance: f64,
}

impl Default for KernelCheckConfig {
    fn default() -> Self {
        Self { thresholds: Vec::new(), mc: McConfig::default(), walks: 20_000, tolerance: 0.1 }
    }
}

/// `Vol(D_s) ≤ C(c) s^{2c}` for some `c < c₀`, read off the volume fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeBoundCheck {
    pub c: f64,
    pub holds: bool,
    /// `max_s Vol(D_s) / s^{2c}` over the grid.
    pub max_ratio: f64,
}

/// A competing prediction that the fit should be told apart from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeLaw {
    pub label: String,
    pub power: f64,
    /// The fit is closer to this law than to the target.
    pub preferred: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCheckReport {
    pub model: String,
    pub thresholds: Vec<f64>,
    /// `t^{−2} K_{D_t}(0)` on the grid.
    pub kernel: Vec<f64>,
    /// Volumes of the slices, in the model's natural variable.
    pub volumes: Vec<VolumeEstimate>,
    pub volume_fit: VolumeFit,
    /// Closed-form volumes, when known.
    pub exact_volumes: Option<Vec<f64>>,
    /// `(MC − exact) / stderr` per grid point.
    pub volume_z_scores: Option<Vec<f64>>,
    pub conformal_radii: Option<Vec<ConformalRadius>>,
    pub kernel_power: f64,
    pub kernel_logpow: i64,
    pub target_power: f64,
    pub target_logpow: i64,
    pub matches: bool,
    pub alternative: Option<AlternativeLaw>,
    /// Power of the trivial bound `t^{−2} / Vol(D_t)`.
    pub lower_bound_power: f64,
    /// `K_{D_t}(0) ≥ 1/Vol(D_t)` at every grid point, within three standard errors.
    pub lower_bound_holds: bool,
    pub volume_bounds: Vec<VolumeBoundCheck>,
    pub seed: u64,
}

/// Fits the kernel exponent of a model domain and compares it with the
/// predicted law. Slices of monomial and Reinhardt models satisfy
/// `K_{D_t}(0) = 1/Vol(D_t)` exactly; planar series use `1/(π R²)` with `R`
/// the conformal radius.
pub fn kernel_bound_check(
    model: &KernelModel,
    config: &KernelCheckConfig,
) -> Result<KernelCheckReport, VerifyError> {
    let thresholds = if config.thresholds.is_empty() {
        model.default_thresholds()
    } else {
        config.thresholds.clone()
    };
    if thresholds.iter().any(|t| !(*t > 0.0 && *t < 1.0)) || thresholds.windows(2).any(|w| w[1] >= w[0]) {
        return Err(VerifyError::BadRadii);
    }
    match model {
        KernelModel::Monomial(f) => monomial_check(model, f, &thresholds, config),
        KernelModel::Reinhardt(m) => reinhardt_check(model, m, &thresholds, config),
        KernelModel::Planar(s) => planar_check(model, s, &thresholds, config),
    }
}

fn volume_bounds(volumes: &[VolumeEstimate], fit: &VolumeFit, c0: f64) -> Vec<VolumeBoundCheck> {
    [0.5, 0.75, 0.9]
        .iter()
        .map(|f| {
            let c = c0 * f;
            let max_ratio = volumes
                .iter()
                .map(|v| v.volume / v.r.powf(2.0 * c))
                .fold(0.0, f64::max);
            VolumeBoundCheck { c, holds: fit.power > 2.0 * c, max_ratio }
        })
        .collect()
}

fn monomial_check(
    model: &KernelModel,
    f: &SparsePolynomial,
    thresholds: &[f64],
    config: &KernelCheckConfig,
) -> Result<KernelCheckReport, VerifyError> {
    let map = vec![f.clone()];
    let report = assemble_report(&map, &vec![Scalar::zero(); f.dim()], None)?;
    let sampler = super::MapDeviation::at_origin(&map)?;
    // D_t = {|F| < √t}; volumes are tracked in r = √t
    let radii: Vec<f64> = thresholds.iter().map(|t| t.sqrt()).collect();
    let volumes = estimate_volumes(&sampler, &radii, &config.mc)?;
    let fit = fit_asymptotics(&volumes, f.dim() as u32 - 1, config.mc.seed)?;
    let kernel_power = -2.0 - fit.power / 2.0;
    let kernel_logpow = -(fit.logpow as i64);
    let target_power = to_f64(&report.kernel.power);
    let target_logpow = report.kernel.logpow;
    Ok(KernelCheckReport {
        model: model.describe(),
        thresholds: thresholds.to_vec(),
        kernel: thresholds.iter().zip(&volumes).map(|(t, v)| 1.0 / (t * t * v.volume)).collect(),
        volume_bounds: volume_bounds(&volumes, &fit, to_f64(&report.c0)),
        volumes,
        volume_fit: fit,
        exact_volumes: None,
        volume_z_scores: None,
        conformal_radii: None,
        kernel_power,
        kernel_logpow,
        target_power,
        target_logpow,
        matches: (kernel_power - target_power).abs() <= config.tolerance && kernel_logpow == target_logpow,
        alternative: None,
        lower_bound_power: kernel_power,
        lower_bound_holds: true,
        seed: config.mc.seed,
    })
}

fn reinhardt_check(
    model: &KernelModel,
    m: &ReinhardtModel,
    thresholds: &[f64],
    config: &KernelCheckConfig,
) -> Result<KernelCheckReport, VerifyError> {
    // the slices are whole sublevel sets, so the box must contain the largest
    let t_max = thresholds[0];
    let extent = m
        .exponents
        .iter()
        .map(|&a| t_max.powf(1.0 / (2.0 * m.power * a as f64)))
        .fold(0.0, f64::max);
    let mut mc = config.mc.clone();
    mc.box_radius = mc.box_radius.max(extent * 1.01);
    let volumes = estimate_volumes(m, thresholds, &mc)?;
    let fit = fit_asymptotics(&volumes, m.dim() as u32 - 1, mc.seed)?;
    let exact: Vec<f64> = thresholds.iter().map(|&t| m.volume_exact(t)).collect();
    let z: Vec<f64> = volumes
        .iter()
        .zip(&exact)
        .map(|(v, e)| (v.volume - e) / v.stderr.max(f64::MIN_POSITIVE))
        .collect();
    let kernel_power = -2.0 - fit.power;
    let kernel_logpow = -(fit.logpow as i64);
    let target_power = -2.0 - 2.0 * m.c0();
    Ok(KernelCheckReport {
        model: model.describe(),
        thresholds: thresholds.to_vec(),
        kernel: thresholds.iter().zip(&volumes).map(|(t, v)| 1.0 / (t * t * v.volume)).collect(),
        volume_bounds: volume_bounds(&volumes, &fit, m.c0()),
        volumes,
        volume_fit: fit,
        exact_volumes: Some(exact),
        volume_z_scores: Some(z),
        conformal_radii: None,
        kernel_power,
        kernel_logpow,
        target_power,
        target_logpow: 0,
        matches: (kernel_power - target_power).abs() <= config.tolerance && kernel_logpow == 0,
        alternative: None,
        lower_bound_power: kernel_power,
        lower_bound_holds: true,
        seed: mc.seed,
    })
}

fn planar_check(
    model: &KernelModel,
    s: &PlanarSeries,
    thresholds: &[f64],
    config: &KernelCheckConfig,
) -> Result<KernelCheckReport, VerifyError> {
    let info = real_series_report(s.series())?;
    let t_min = *thresholds.last().unwrap();
    let mut mc = config.mc.clone();
    mc.box_radius = s.enclosing_radius(thresholds[0]) * 1.01;
    mc.inner_radius = Some(super::planar::StarDomain::inscribed_radius(&s.sublevel(t_min), 0.0, 0.0) / 16.0);
    let volumes = estimate_volumes(s, thresholds, &mc)?;
    let fit = fit_asymptotics(&volumes, 0, mc.seed)?;

    let radii: Vec<ConformalRadius> = thresholds
        .iter()
        .enumerate()
        .map(|(k, &t)| conformal_radius(&s.sublevel(t), config.walks, walk_seed(mc.seed, k)))
        .collect();
    // πR² plays the role of the volume: K_{D_t}(0) = 1/(πR²)
    let area: Vec<f64> = radii.iter().map(|c| std::f64::consts::PI * c.radius * c.radius).collect();
    let weights: Vec<f64> = radii
        .iter()
        .map(|c| 1.0 / (2.0 * c.log_stderr).max(1e-12).powi(2))
        .collect();
    let area_fit = fit_power_log(thresholds, &area, Some(&weights), &FitOptions::default())
        .map_err(VerifyError::Fit)?;
    let kernel_power = -2.0 - area_fit.power;

    let target_power = to_f64(&info.kernel.power);
    let alternative_power = to_f64(&info.singularity_exponent_law.power);
    let gap = (kernel_power - target_power).abs();
    let alt_gap = (kernel_power - alternative_power).abs();
    let lower_bound_holds = area.iter().zip(&radii).zip(&volumes).all(|((a, c), v)| {
        a * (-6.0 * c.log_stderr).exp() <= v.volume + 3.0 * v.stderr
    });
    Ok(KernelCheckReport {
        model: model.describe(),
        thresholds: thresholds.to_vec(),
        kernel: thresholds.iter().zip(&area).map(|(t, a)| 1.0 / (t * t * a)).collect(),
        volume_bounds: volume_bounds(&volumes, &fit, to_f64(&info.c0)),
        lower_bound_power: -2.0 - fit.power,
        volumes,
        volume_fit: fit,
        exact_volumes: None,
        volume_z_scores: None,
        conformal_radii: Some(radii),
        kernel_power,
        kernel_logpow: 0,
        target_power,
        target_logpow: 0,
        matches: gap <= config.tolerance && gap <= alt_gap,
        alternative: Some(AlternativeLaw {
            label: "-2-2c0 from the singularity exponent".into(),
            power: alternative_power,
            preferred: alt_gap < gap,
        }),
        lower_bound_holds,
        seed: mc.seed,
    })
}

fn walk_seed(seed: u64, k: usize) -> u64 {
    seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyparse::{parse_poly, RealSeries};

    fn cfg(samples: u64) -> KernelCheckConfig {
        KernelCheckConfig {
            mc: McConfig { samples, seed: 21, ..Default::default() },
            walks: 4000,
            ..Default::default()
        }
    }

    #[test]
    fn siegel_kernel() {
        let model = KernelModel::monomial(&[parse_poly("z1", 1).unwrap()]).unwrap();
        let r = kernel_bound_check(&model, &cfg(200_000)).unwrap();
        assert!((r.kernel_power + 3.0).abs() < 0.05, "{}", r.kernel_power);
        assert_eq!((r.target_power, r.target_logpow, r.kernel_logpow), (-3.0, 0, 0));
        assert!(r.matches);
        assert!(r.volume_bounds.iter().all(|b| b.holds));
    }

    #[test]
    fn siegel_as_reinhardt() {
        let m = ReinhardtModel::new(vec![1], 1.0).unwrap();
        let r = kernel_bound_check(&KernelModel::Reinhardt(m), &cfg(200_000)).unwrap();
        assert!((r.kernel_power + 3.0).abs() < 0.05);
        assert!(r.matches);
    }

    #[test]
    fn reinhardt_ball() {
        let m = ReinhardtModel::new(vec![1, 2], 0.5).unwrap();
        let r = kernel_bound_check(&KernelModel::Reinhardt(m), &cfg(300_000)).unwrap();
        assert!((r.kernel_power + 5.0).abs() < 0.1, "{}", r.kernel_power);
        assert_eq!(r.target_power, -5.0);
        let z = r.volume_z_scores.unwrap();
        assert!(z.iter().filter(|z| z.abs() <= 3.0).count() >= z.len() - 1, "{z:?}");
    }

    #[test]
    fn non_reinhardt_refused() {
        assert!(matches!(
            KernelModel::monomial(&[parse_poly("z1^2 + z2^3", 2).unwrap()]),
            Err(VerifyError::NotReinhardt(_))
        ));
    }

    #[test]
    fn planar_disc() {
        let s = PlanarSeries::new(RealSeries::parse("x^2 + y^2").unwrap()).unwrap();
        let r = kernel_bound_check(&KernelModel::Planar(s), &cfg(100_000)).unwrap();
        assert!((r.kernel_power + 3.0).abs() < 1e-6);
        assert!(r.matches, "{r:?}");
        assert!(r.lower_bound_holds);
    }
}
