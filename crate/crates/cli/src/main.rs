//! `cse-kit`: singularity exponents, Newton polyhedra, chart asymptotics and
//! Monte-Carlo verification from the command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 degenerate input without
//! chart data, 3 failed verification.

mod config;
mod output;
mod verify;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use cse_core::charts::{chart_asymptotic, h_poles, ChartLaws, Pole};
use cse_core::exponents::{assemble_report, real_series_report, ExponentError};
use cse_core::newton::{
    build_polyhedron, diagonal_intersection, enumerate_compact_faces, nondegeneracy_of, polyhedron_of,
    DiagonalData, Face, Inequality, Nondegeneracy,
};
use cse_core::polyparse::recenter;
use cse_core::rational::serde_pq;
use cse_core::Rational;

use config::{InputArgs, Inputs, McArgs};
use output::emit;

#[derive(Debug, Parser)]
#[command(name = "cse-kit", version, about = "Complex singularity exponents and Bergman kernel boundary laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full report: exponents, log orders, kernel / metric / curvature / volume laws.
    Analyze(InputArgs),
    /// Newton polyhedron, compact faces, diagonal data and nondegeneracy.
    Newton(InputArgs),
    /// Pole bookkeeping and laws from resolution chart data.
    Charts(InputArgs),
    /// Monte-Carlo check of the predicted laws.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// F(z0 + z) − F(z0) as a polynomial map in z.
    Recenter(InputArgs),
}

/// Error carrying a specific exit status.
#[derive(Debug)]
struct Exit(u8);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if let Some(Exit(code)) = e.downcast_ref::<Exit>() {
                return ExitCode::from(*code);
            }
            eprintln!("error: {e:#}");
            let degenerate = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<ExponentError>(), Some(ExponentError::NeedsCharts(_))));
            ExitCode::from(if degenerate { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze(args) => analyze(&args.resolve("analyze", true)?),
        Command::Newton(args) => newton(&args.resolve("newton", true)?),
        Command::Charts(args) => charts(&args.resolve("charts", false)?),
        Command::Recenter(args) => recenter_cmd(&args.resolve("recenter", true)?),
        Command::Verify { input, mc } => {
            let needs_map = mc.report.is_none() && mc.reinhardt.is_none();
            let mut inputs = input.resolve("verify", needs_map)?;
            inputs.config.monte_carlo = Some(mc.settings()?);
            verify::run(&inputs)
        }
    }
}

fn analyze(inputs: &Inputs) -> Result<ExitCode> {
    if let Some(series) = &inputs.series {
        let report = real_series_report(series)?;
        emit(&inputs.config, &report, output::real_series_text(&report), output::real_series_csv(&report))?;
        return Ok(ExitCode::SUCCESS);
    }
    let report = assemble_report(&inputs.map, &inputs.base_point, inputs.charts.as_ref())?;
    emit(&inputs.config, &report, output::report_text(&report), output::report_csv(&report))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct NewtonOutput {
    dimension: usize,
    vertices: Vec<Vec<u32>>,
    facets: Vec<Inequality>,
    compact_faces: Vec<Face>,
    diagonals: Vec<DiagonalData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nondegeneracy: Option<Nondegeneracy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    real_series: Option<RealAnnotation>,
}

#[derive(Debug, Serialize)]
struct RealAnnotation {
    #[serde(with = "serde_pq")]
    delta: Rational,
    #[serde(with = "serde_pq")]
    d0: Rational,
    mismatch: bool,
}

fn newton(inputs: &Inputs) -> Result<ExitCode> {
    let (poly, nondegeneracy, real_series) = if let Some(series) = &inputs.series {
        let poly = build_polyhedron(&series.real_supports(), 2)?;
        let info = real_series_report(series)?;
        let note = RealAnnotation { delta: info.delta, d0: info.d0, mismatch: info.mismatch };
        (poly, None, Some(note))
    } else {
        if inputs.map.len() != 1 {
            bail!("the newton command takes a single polynomial");
        }
        let f = recenter(&inputs.map, &inputs.base_point).remove(0);
        if f.is_zero() {
            bail!("the polynomial is constant");
        }
        let poly = polyhedron_of(&f)?;
        let verdict = nondegeneracy_of(&f, &poly);
        (poly, Some(verdict), None)
    };
    let n = poly.dim();
    let mut diagonals = Vec::new();
    for &tau in &inputs.config.tau {
        let axes = if tau == 0 { 1 } else { n };
        diagonals.extend((0..axes).map(|axis| diagonal_intersection(&poly, tau, axis)));
    }
    let out = NewtonOutput {
        dimension: n,
        vertices: poly.vertices().into_iter().map(|v| v.0).collect(),
        facets: poly.facets().to_vec(),
        compact_faces: enumerate_compact_faces(&poly),
        diagonals,
        nondegeneracy,
        real_series,
    };
    emit(&inputs.config, &out, output::newton_text(&out), output::newton_csv(&out))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct ChartsOutput {
    dimension: usize,
    laws: Vec<TauLaws>,
}

#[derive(Debug, Serialize)]
struct TauLaws {
    tau: u32,
    #[serde(flatten)]
    laws: ChartLaws,
    /// Poles of each chart.
    poles: Vec<Vec<Pole>>,
}

fn charts(inputs: &Inputs) -> Result<ExitCode> {
    let data = inputs.charts.as_ref().context("the charts command needs --charts FILE")?;
    let laws = inputs
        .config
        .tau
        .iter()
        .map(|&tau| {
            Ok(TauLaws {
                tau,
                laws: chart_asymptotic(data, tau)?,
                poles: data.charts.iter().map(|c| h_poles(c, tau)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = ChartsOutput { dimension: data.dim(), laws };
    emit(&inputs.config, &out, output::charts_text(&out), output::charts_csv(&out))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct RecenterOutput {
    base_point: Vec<String>,
    map: Vec<String>,
}

fn recenter_cmd(inputs: &Inputs) -> Result<ExitCode> {
    let map = recenter(&inputs.map, &inputs.base_point);
    let out = RecenterOutput {
        base_point: inputs.base_point.iter().map(|s| s.to_string()).collect(),
        map: map.iter().map(|f| f.to_string()).collect(),
    };
    let text = out.map.join("\n") + "\n";
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["component", "polynomial"])?;
    for (i, f) in out.map.iter().enumerate() {
        csv.write_record([(i + 1).to_string(), f.clone()])?;
    }
    emit(&inputs.config, &out, text, String::from_utf8(csv.into_inner()?)?)?;
    Ok(ExitCode::SUCCESS)
}
