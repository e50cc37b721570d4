use std::fs;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use cse_core::charts::ChartData;
use cse_core::polyparse::{parse_point, parse_poly, RealSeries, SparsePolynomial};
use cse_core::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Input and run parameters shared by every command.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Polynomial in z1…zn, e.g. "z1^4 + z1^2*z2 + z1*z2^2 + z2^4".
    #[arg(long)]
    pub poly: Option<String>,
    /// Map components separated by ';'.
    #[arg(long, conflicts_with = "poly")]
    pub map: Option<String>,
    /// Resolution chart file (JSON: list of charts, each a list of [a, b, c]).
    #[arg(long)]
    pub charts: Option<String>,
    /// Planar real series in x, y with even exponents, for --real mode.
    #[arg(long)]
    pub series: Option<String>,
    /// Treat the input as a real series on the plane.
    #[arg(long)]
    pub real: bool,
    /// Ambient dimension; inferred from the highest variable index if absent.
    #[arg(short = 'n', long = "dim")]
    pub dim: Option<usize>,
    /// Base point, comma separated (default: origin).
    #[arg(long = "at")]
    pub at: Option<String>,
    /// Weights τ for diagonal data, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0u32, 1, 2])]
    pub tau: Vec<u32>,
    #[arg(long, default_value_t = Format::Text, value_enum)]
    pub format: Format,
}

/// Monte-Carlo parameters of `verify`.
#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0625)]
    pub rmax: f64,
    #[arg(long, default_value_t = 6.103515625e-5)]
    pub rmin: f64,
    #[arg(long, default_value_t = 11)]
    pub rsteps: usize,
    /// Relative tolerance on fitted powers.
    #[arg(long, default_value_t = 0.05)]
    pub power_tol: f64,
    /// Absolute tolerance on fitted kernel powers.
    #[arg(long, default_value_t = 0.1)]
    pub kernel_tol: f64,
    /// Walks per threshold for planar conformal radii.
    #[arg(long, default_value_t = 20_000)]
    pub walks: u64,
    /// Predictions to check, as emitted by `analyze --format json`.
    #[arg(long)]
    pub report: Option<String>,
    /// Check the kernel law of a monomial through slice volumes.
    #[arg(long)]
    pub kernel: bool,
    /// Exponents a_j of ρ = (Σ|z_j|^(2a_j))^p, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub reinhardt: Option<Vec<u32>>,
    /// The power p of the Reinhardt model.
    #[arg(long, default_value_t = 1.0)]
    pub rho_power: f64,
}

/// Everything needed to reproduce a run; embedded in every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub map: Vec<String>,
    pub charts: Option<String>,
    pub series: Option<String>,
    pub real: bool,
    pub dimension: Option<usize>,
    pub base_point: Option<Vec<String>>,
    pub tau: Vec<u32>,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub monte_carlo: Option<McSettings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
    pub r_max: f64,
    pub r_min: f64,
    pub r_steps: usize,
    pub power_tolerance: f64,
    pub kernel_tolerance: f64,
    pub walks: u64,
    pub report: Option<String>,
    pub kernel: bool,
    pub reinhardt: Option<Vec<u32>>,
    pub rho_power: f64,
}

/// Parsed, validated inputs.
pub struct Inputs {
    pub config: RunConfig,
    pub map: Vec<SparsePolynomial>,
    pub base_point: Vec<Scalar>,
    pub charts: Option<ChartData>,
    pub series: Option<RealSeries>,
}

/// Largest `k` among identifiers `zk` in the text.
fn infer_dim(texts: &[String]) -> usize {
    let mut best = 0;
    for text in texts {
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let prev_ident = i > 0 && (chars[i - 1].is_alphanumeric() || chars[i - 1] == '_');
            if chars[i] == 'z' && !prev_ident {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if let Ok(k) = chars[i + 1..j].iter().collect::<String>().parse::<usize>() {
                    best = best.max(k);
                }
                i = j;
            } else {
                i += 1;
            }
        }
    }
    best.max(1)
}

impl InputArgs {
    pub fn resolve(&self, command: &str, needs_map: bool) -> Result<Inputs> {
        let texts: Vec<String> = match (&self.poly, &self.map) {
            (Some(p), _) => vec![p.clone()],
            (None, Some(m)) => m.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            (None, None) => Vec::new(),
        };
        let series = match &self.series {
            Some(s) => Some(RealSeries::parse(s).with_context(|| format!("cannot parse series {s:?}"))?),
            None => None,
        };
        if self.real && series.is_none() {
            bail!("--real needs --series");
        }
        if series.is_some() && !self.real {
            bail!("--series is only read in --real mode");
        }
        let charts = match &self.charts {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
                Some(ChartData::from_json(&text)?)
            }
            None => None,
        };
        if needs_map && texts.is_empty() && !self.real {
            bail!("give a polynomial with --poly or a map with --map");
        }
        let dim = self.dim.unwrap_or_else(|| infer_dim(&texts));
        let map = texts
            .iter()
            .map(|t| parse_poly(t, dim).with_context(|| format!("cannot parse {t:?}")))
            .collect::<Result<Vec<_>>>()?;
        let base_point = match &self.at {
            Some(text) => {
                let p = parse_point(text).with_context(|| format!("cannot parse base point {text:?}"))?;
                if !map.is_empty() && p.len() != dim {
                    bail!("base point has {} coordinates, expected {dim}", p.len());
                }
                p
            }
            None => vec![Scalar::zero(); dim],
        };
        if let Some(c) = &charts {
            if !map.is_empty() && c.dim() != dim {
                bail!("charts have {} coordinates, the map has {dim}", c.dim());
            }
        }
        let config = RunConfig {
            command: command.to_string(),
            map: texts,
            charts: self.charts.clone(),
            series: self.series.clone(),
            real: self.real,
            dimension: self.dim,
            base_point: self.at.as_ref().map(|_| base_point.iter().map(|s| s.to_string()).collect()),
            tau: self.tau.clone(),
            format: self.format,
            monte_carlo: None,
        };
        Ok(Inputs { config, map, base_point, charts, series })
    }
}

impl McArgs {
    pub fn settings(&self) -> Result<McSettings> {
        if self.samples < 10_000 {
            bail!("--samples must be at least 10000");
        }
        if !(self.rmax > self.rmin && self.rmin > 0.0 && self.rmax < 1.0) {
            bail!("need 0 < --rmin < --rmax < 1");
        }
        if self.rsteps < 6 {
            bail!("--rsteps must be at least 6");
        }
        Ok(McSettings {
            samples: self.samples,
            seed: self.seed,
            r_max: self.rmax,
            r_min: self.rmin,
            r_steps: self.rsteps,
            power_tolerance: self.power_tol,
            kernel_tolerance: self.kernel_tol,
            walks: self.walks,
            report: self.report.clone(),
            kernel: self.kernel,
            reinhardt: self.reinhardt.clone(),
            rho_power: self.rho_power,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_from_variables() {
        assert_eq!(infer_dim(&["z1^4 + z1^2*z2".into()]), 2);
        assert_eq!(infer_dim(&["z3".into(), "z1".into()]), 3);
        assert_eq!(infer_dim(&["2".into()]), 1);
        assert_eq!(infer_dim(&["z12*z1".into()]), 12);
    }
}
