use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use cse_core::exponents::{assemble_report, SingularityReport};
use cse_core::mc_verify::{
    kernel_bound_check, radius_grid, verify_volume_law, KernelCheckConfig, KernelCheckReport,
    KernelModel, McConfig, PlanarSeries, ReinhardtModel, VolumeEstimate, VolumeFit,
};
use cse_core::polyparse::{parse_poly, SparsePolynomial};
use cse_core::rational::to_f64;
use cse_core::scalar::Scalar;

use crate::config::{Inputs, McSettings};
use crate::output::{csv_rows, emit, Envelope};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Comparison {
    pub quantity: String,
    pub predicted: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Comparison {
    fn relative(quantity: &str, predicted: f64, measured: f64, tol: f64) -> Self {
        let pass = (measured - predicted).abs() <= tol * predicted.abs();
        Self { quantity: quantity.into(), predicted, measured, tolerance: tol * predicted.abs(), pass }
    }

    fn absolute(quantity: &str, predicted: f64, measured: f64, tol: f64) -> Self {
        let pass = (measured - predicted).abs() <= tol;
        Self { quantity: quantity.into(), predicted, measured, tolerance: tol, pass }
    }

    fn exact(quantity: &str, predicted: i64, measured: i64) -> Self {
        Self {
            quantity: quantity.into(),
            predicted: predicted as f64,
            measured: measured as f64,
            tolerance: 0.0,
            pass: predicted == measured,
        }
    }

    fn flag(quantity: &str, pass: bool) -> Self {
        Self { quantity: quantity.into(), predicted: 1.0, measured: pass as u8 as f64, tolerance: 0.0, pass }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub pass: bool,
    pub comparisons: Vec<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume_fit: Option<VolumeFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_check: Option<KernelCheckReport>,
}

/// Predictions from an `analyze` JSON file (enveloped or bare).
fn load_report(path: &str) -> Result<SingularityReport> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
    let value: serde_json::Value = serde_json::from_str(&text).context("report is not valid JSON")?;
    let report = if value.get("result").is_some() {
        serde_json::from_value::<Envelope<SingularityReport>>(value)?.result
    } else {
        serde_json::from_value(value)?
    };
    Ok(report)
}

pub fn run(inputs: &Inputs) -> Result<ExitCode> {
    let mc = inputs.config.monte_carlo.clone().expect("verify carries Monte-Carlo settings");
    let output = if let Some(series) = &inputs.series {
        let model = KernelModel::Planar(PlanarSeries::new(series.clone())?);
        kernel_mode(&model, &mc)?
    } else if let Some(a) = &mc.reinhardt {
        kernel_mode(&KernelModel::Reinhardt(ReinhardtModel::new(a.clone(), mc.rho_power)?), &mc)?
    } else if mc.kernel {
        if inputs.base_point.iter().any(|s| !s.is_zero()) {
            bail!("--kernel works at the origin only");
        }
        kernel_mode(&KernelModel::monomial(&inputs.map)?, &mc)?
    } else {
        volume_mode(inputs, &mc)?
    };
    let estimates: &[VolumeEstimate] = match (&output.volume_fit, &output.kernel_check) {
        (Some(f), _) => &f.estimates,
        (None, Some(k)) => &k.volumes,
        _ => &[],
    };
    let csv = csv_rows(
        &["r", "volume", "stderr", "hits"],
        estimates.iter().map(|e| {
            [e.r.to_string(), e.volume.to_string(), e.stderr.to_string(), e.hits.to_string()]
        }),
    )?;
    emit(&inputs.config, &output, text(&output), csv)?;
    if output.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        for c in output.comparisons.iter().filter(|c| !c.pass) {
            eprintln!("FAIL {}: predicted {}, measured {}", c.quantity, c.predicted, c.measured);
        }
        Ok(ExitCode::from(3))
    }
}

fn volume_mode(inputs: &Inputs, mc: &McSettings) -> Result<VerifyOutput> {
    let (report, map, base_point): (SingularityReport, Vec<SparsePolynomial>, Vec<Scalar>) = match &mc.report {
        Some(path) => {
            let report = load_report(path)?;
            // the report's map is already centred at its base point
            let map = report
                .map
                .iter()
                .map(|t| parse_poly(t, report.dimension).with_context(|| format!("cannot parse {t:?}")))
                .collect::<Result<Vec<_>>>()?;
            let origin = vec![Scalar::zero(); report.dimension];
            (report, map, origin)
        }
        None => {
            let report = assemble_report(&inputs.map, &inputs.base_point, inputs.charts.as_ref())?;
            (report, inputs.map.clone(), inputs.base_point.clone())
        }
    };
    let radii = radius_grid(mc.r_max, mc.r_min, mc.r_steps);
    let config = McConfig { samples: mc.samples, seed: mc.seed, ..Default::default() };
    let fit = verify_volume_law(&map, &base_point, &radii, &config)?;
    let comparisons = vec![
        Comparison::relative("volume power 2c0", 2.0 * to_f64(&report.c0), fit.power, mc.power_tolerance),
        Comparison::exact("volume log power m0-1", report.m0.value as i64 - 1, fit.logpow as i64),
    ];
    Ok(VerifyOutput {
        pass: comparisons.iter().all(|c| c.pass),
        comparisons,
        volume_fit: Some(fit),
        kernel_check: None,
    })
}

fn kernel_mode(model: &KernelModel, mc: &McSettings) -> Result<VerifyOutput> {
    let config = KernelCheckConfig {
        thresholds: Vec::new(),
        mc: McConfig { samples: mc.samples, seed: mc.seed, ..Default::default() },
        walks: mc.walks,
        tolerance: mc.kernel_tolerance,
    };
    let report = kernel_bound_check(model, &config)?;
    let mut comparisons = vec![
        Comparison::absolute("kernel power", report.target_power, report.kernel_power, mc.kernel_tolerance),
        Comparison::exact("kernel log power", report.target_logpow, report.kernel_logpow),
    ];
    if let Some(alt) = &report.alternative {
        comparisons.push(Comparison::flag(
            &format!("fit closer to target than to {} = {}", alt.label, alt.power),
            !alt.preferred,
        ));
    }
    comparisons.push(Comparison::flag("K >= 1/Vol on every slice", report.lower_bound_holds));
    for b in &report.volume_bounds {
        comparisons.push(Comparison::flag(&format!("Vol <= C s^(2c) for c = {:.4}", b.c), b.holds));
    }
    if let Some(z) = &report.volume_z_scores {
        let within = z.iter().filter(|z| z.abs() <= 3.0).count() as f64 / z.len() as f64;
        comparisons.push(Comparison {
            quantity: "closed-form volumes within 3 sigma (fraction)".into(),
            predicted: 0.95,
            measured: within,
            tolerance: 0.0,
            pass: within >= 0.95,
        });
    }
    Ok(VerifyOutput {
        pass: comparisons.iter().all(|c| c.pass),
        comparisons,
        volume_fit: None,
        kernel_check: Some(report),
    })
}

fn text(o: &VerifyOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<58} {:>12} {:>12} {:>10}  result", "check", "predicted", "measured", "tolerance");
    for c in &o.comparisons {
        let _ = writeln!(
            s,
            "{:<58} {:>12.6} {:>12.6} {:>10.4}  {}",
            c.quantity,
            c.predicted,
            c.measured,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    let estimates = o
        .volume_fit
        .as_ref()
        .map(|f| &f.estimates)
        .or(o.kernel_check.as_ref().map(|k| &k.volumes));
    if let Some(est) = estimates {
        let _ = writeln!(s, "\n{:>12} {:>14} {:>12} {:>10}", "r", "volume", "stderr", "hits");
        for e in est {
            let _ = writeln!(s, "{:>12.4e} {:>14.6e} {:>12.4e} {:>10}", e.r, e.volume, e.stderr, e.hits);
        }
    }
    let _ = writeln!(s, "\n{}", if o.pass { "all checks passed" } else { "verification FAILED" });
    s
}
