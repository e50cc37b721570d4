//! Resolution-chart engine.
//!
//! A chart records monomial vanishing orders `(a_j, b_j, c_j)` of `F∘μ`, the
//! Jacobian of `μ` and the pullback of a distinguished coordinate. The model
//! integral of a chart is
//!
//! ```text
//! Ĩ(t) = ∫_{y ∈ [0,1]ⁿ, ∏ y_j^{a_j} < t} ∏ y_j^{e_j} dy,   e_j = 2b_j + 2c_jτ + 1,
//! ```
//!
//! and `Ĩ(t) ≍ t^{2β} (log 1/t)^{α−1}` where `β` is the smallest pole of
//! `c ↦ ∫ (∏ y^a)^{−2c} ∏ y^{e} dy` and `α` its multiplicity.

use std::collections::BTreeMap;

use quadrature::double_exponential::integrate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::{AsymptoticLaw, LimitVariable};
use crate::fit::{fit_power_log, FitError, FitOptions, PowerLogFit};
use crate::rational::{int, rat, serde_pq, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("no charts given")]
    Empty,
    #[error("chart {0} has no coordinates")]
    EmptyChart(usize),
    #[error("chart {0} has every a_j = 0, so F does not vanish on it")]
    NoVanishing(usize),
    #[error("chart {chart} has {found} coordinates, expected {expected}")]
    LengthMismatch { chart: usize, expected: usize, found: usize },
    #[error("invalid chart JSON: {0}")]
    Json(String),
}

/// `(a, b, c)`: orders of `F∘μ`, of the Jacobian and of the distinguished
/// coordinate along one local coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[u32; 3]", into = "[u32; 3]")]
pub struct ChartEntry {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl From<[u32; 3]> for ChartEntry {
    fn from([a, b, c]: [u32; 3]) -> Self {
        Self { a, b, c }
    }
}

impl From<ChartEntry> for [u32; 3] {
    fn from(e: ChartEntry) -> Self {
        [e.a, e.b, e.c]
    }
}

impl ChartEntry {
    /// Exponent `2b + 2cτ + 1` of the model integrand.
    pub fn weight_exponent(&self, tau: u32) -> u32 {
        2 * self.b + 2 * self.c * tau + 1
    }

    /// Pole location `(b + cτ + 1)/a`, for `a > 0`.
    pub fn pole(&self, tau: u32) -> Option<Rational> {
        (self.a > 0).then(|| rat((self.b + self.c * tau + 1) as i64, self.a as i64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chart {
    pub entries: Vec<ChartEntry>,
}

impl Chart {
    pub fn new(entries: impl IntoIterator<Item = (u32, u32, u32)>) -> Self {
        Self { entries: entries.into_iter().map(|(a, b, c)| ChartEntry { a, b, c }).collect() }
    }

    /// Chart of a monomial `z^γ` in its own coordinates.
    pub fn monomial(gamma: &[u32]) -> Self {
        Self::new(gamma.iter().enumerate().map(|(j, &a)| (a, 0, u32::from(j == 0))))
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

/// A finite set of charts covering a neighbourhood of the origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChartData {
    pub charts: Vec<Chart>,
}

impl ChartData {
    pub fn new(charts: Vec<Chart>) -> Result<Self, ChartError> {
        let data = Self { charts };
        data.validate()?;
        Ok(data)
    }

    pub fn from_json(text: &str) -> Result<Self, ChartError> {
        let data: Self = serde_json::from_str(text).map_err(|e| ChartError::Json(e.to_string()))?;
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<(), ChartError> {
        let first = self.charts.first().ok_or(ChartError::Empty)?;
        for (i, chart) in self.charts.iter().enumerate() {
            if chart.entries.is_empty() {
                return Err(ChartError::EmptyChart(i));
            }
            if chart.dim() != first.dim() {
                return Err(ChartError::LengthMismatch { chart: i, expected: first.dim(), found: chart.dim() });
            }
            if chart.entries.iter().all(|e| e.a == 0) {
                return Err(ChartError::NoVanishing(i));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.charts.first().map_or(0, Chart::dim)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pole {
    #[serde(with = "serde_pq")]
    pub location: Rational,
    pub multiplicity: usize,
}

/// Poles of the chart's Mellin-type integral in the exponent variable,
/// ascending, with coincidence counts as multiplicities.
pub fn h_poles(chart: &Chart, tau: u32) -> Vec<Pole> {
    let mut counts: BTreeMap<Rational, usize> = BTreeMap::new();
    for p in chart.entries.iter().filter_map(|e| e.pole(tau)) {
        *counts.entry(p).or_default() += 1;
    }
    counts.into_iter().map(|(location, multiplicity)| Pole { location, multiplicity }).collect()
}

/// Smallest pole over all charts and the largest multiplicity it attains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartExponent {
    #[serde(with = "serde_pq")]
    pub beta: Rational,
    pub alpha: usize,
}

pub fn cse_from_charts(charts: &ChartData, tau: u32) -> Result<ChartExponent, ChartError> {
    charts.validate()?;
    let mut best: Option<ChartExponent> = None;
    for chart in &charts.charts {
        let first = h_poles(chart, tau).into_iter().next().expect("validated: some a_j > 0");
        best = Some(match best {
            None => ChartExponent { beta: first.location, alpha: first.multiplicity },
            Some(b) if first.location < b.beta => {
                ChartExponent { beta: first.location, alpha: first.multiplicity }
            }
            Some(b) if first.location == b.beta => {
                ChartExponent { beta: b.beta, alpha: b.alpha.max(first.multiplicity) }
            }
            Some(b) => b,
        });
    }
    Ok(best.unwrap())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartLaws {
    #[serde(flatten)]
    pub exponent: ChartExponent,
    /// Law of `Vol{|F| < r}`.
    pub modf: AsymptoticLaw,
    /// Same law in the `Im w` variable, via `|F|² < Im w`.
    pub imw: AsymptoticLaw,
}

pub fn chart_asymptotic(charts: &ChartData, tau: u32) -> Result<ChartLaws, ChartError> {
    let exponent = cse_from_charts(charts, tau)?;
    let logpow = exponent.alpha as i64 - 1;
    Ok(ChartLaws {
        modf: AsymptoticLaw::new(int(2) * &exponent.beta, logpow, LimitVariable::RToZero),
        imw: AsymptoticLaw::new(exponent.beta.clone(), logpow, LimitVariable::ImwToZero),
        exponent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItildeMethod {
    Quadrature,
    QuasiMonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItildeValue {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    pub method: ItildeMethod,
}

/// Positive-order coordinates up to which nested quadrature is used.
pub const MAX_QUADRATURE_DIM: usize = 3;
const RELATIVE_TOLERANCE: f64 = 1e-12;
const QMC_REPLICATES: usize = 16;
const QMC_POINTS: usize = 1 << 13;
const QMC_SEED: u64 = 0x716d63;

/// Evaluates `Ĩ(t)` by nested quadrature in log variables, or by randomized
/// Halton sampling beyond [`MAX_QUADRATURE_DIM`] vanishing coordinates.
pub fn itilde_exact(chart: &Chart, tau: u32, t: f64) -> ItildeValue {
    assert!(t > 0.0, "t must be positive");
    // coordinates with a = 0 do not enter the constraint and factor out
    let free: f64 = chart
        .entries
        .iter()
        .filter(|e| e.a == 0)
        .map(|e| 1.0 / (e.weight_exponent(tau) as f64 + 1.0))
        .product();
    let active: Vec<(f64, f64)> = chart
        .entries
        .iter()
        .filter(|e| e.a > 0)
        .map(|e| (e.a as f64, e.weight_exponent(tau) as f64))
        .collect();
    assert!(!active.is_empty(), "chart must vanish somewhere");
    if active.len() <= MAX_QUADRATURE_DIM {
        let (value, error) = nested(&active, t.ln());
        ItildeValue { value: free * value, error: free * error, method: ItildeMethod::Quadrature }
    } else {
        let (value, error) = quasi_monte_carlo(&active, t.ln());
        ItildeValue { value: free * value, error: free * error, method: ItildeMethod::QuasiMonteCarlo }
    }
}

fn full_product(coords: &[(f64, f64)]) -> f64 {
    coords.iter().map(|(_, e)| 1.0 / (e + 1.0)).product()
}

/// `Ĩ` restricted to `coords`, at threshold `exp(log_t)`, with error estimate.
fn nested(coords: &[(f64, f64)], log_t: f64) -> (f64, f64) {
    if log_t >= 0.0 {
        return (full_product(coords), 0.0);
    }
    let (a, e) = *coords.last().unwrap();
    let inner = &coords[..coords.len() - 1];
    // y ≤ t^{1/a}: the remaining constraint is vacuous
    let head = full_product(inner) * ((e + 1.0) * log_t / a).exp() / (e + 1.0);
    if inner.is_empty() {
        return (head, 0.0);
    }
    // y = exp(−s) for s ∈ [0, −log t / a]
    let span = -log_t / a;
    let integrand = |s: f64| (-(e + 1.0) * s).exp() * nested(inner, log_t + a * s).0;
    let scale = (0..=8)
        .map(|k| integrand(span * k as f64 / 8.0))
        .fold(0.0, f64::max)
        * span
        / 8.0;
    let target = RELATIVE_TOLERANCE * (head + scale).max(f64::MIN_POSITIVE);
    let out = integrate(integrand, 0.0, span, target);
    (head + out.integral, out.error_estimate)
}

/// Outer coordinates sampled on shifted Halton points, innermost in closed form.
fn quasi_monte_carlo(coords: &[(f64, f64)], log_t: f64) -> (f64, f64) {
    const PRIMES: [u8; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let (a_in, e_in) = *coords.last().unwrap();
    let outer = &coords[..coords.len() - 1];
    assert!(outer.len() <= PRIMES.len(), "dimension too large for the Halton bases");
    let mut rng = ChaCha8Rng::seed_from_u64(QMC_SEED);
    let mut means = Vec::with_capacity(QMC_REPLICATES);
    for _ in 0..QMC_REPLICATES {
        let shift: Vec<f64> = (0..outer.len()).map(|_| rng.random::<f64>()).collect();
        let mut sum = 0.0;
        for i in 1..=QMC_POINTS {
            let mut log_weight = 0.0;
            let mut log_prod = 0.0;
            for (k, &(a, e)) in outer.iter().enumerate() {
                let u = (halton::number(PRIMES[k], i) + shift[k]).fract();
                let y = 1.0 - u;
                let ly = y.ln();
                log_weight += e * ly;
                log_prod += a * ly;
            }
            let log_upper = ((log_t - log_prod) / a_in).min(0.0);
            sum += (log_weight + (e_in + 1.0) * log_upper).exp() / (e_in + 1.0);
        }
        means.push(sum / QMC_POINTS as f64);
    }
    let m = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
    (m, (var / means.len() as f64).sqrt())
}

/// Fits `Ĩ(t) ≍ t^p (log 1/t)^q` on the given thresholds.
pub fn itilde_fit(chart: &Chart, tau: u32, thresholds: &[f64]) -> Result<PowerLogFit, FitError> {
    let values: Vec<f64> = thresholds.iter().map(|&t| itilde_exact(chart, tau, t).value).collect();
    let options = FitOptions { max_logpow: chart.dim().saturating_sub(1) as u32, ..FitOptions::default() };
    fit_power_log(thresholds, &values, None, &options)
}

/// Log-spaced thresholds from `lo` to `hi`, `count` points, decreasing.
pub fn log_grid(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|k| hi * (-step * k as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poles(chart: &Chart, tau: u32) -> Vec<(Rational, usize)> {
        h_poles(chart, tau).into_iter().map(|p| (p.location, p.multiplicity)).collect()
    }

    #[test]
    fn pole_bookkeeping() {
        assert_eq!(poles(&Chart::new([(1, 0, 0), (1, 0, 0)]), 0), vec![(int(1), 2)]);
        assert_eq!(
            poles(&Chart::new([(2, 1, 0), (3, 0, 1)]), 1),
            vec![(rat(2, 3), 1), (int(1), 1)]
        );
        assert_eq!(poles(&Chart::new([(1, 0, 0)]), 0), vec![(int(1), 1)]);
        // coordinates with a = 0 carry no pole
        assert_eq!(poles(&Chart::new([(0, 3, 0), (2, 0, 0)]), 0), vec![(rat(1, 2), 1)]);
    }

    #[test]
    fn exponents_and_aggregation() {
        let one = ChartData::new(vec![Chart::new([(1, 0, 0), (1, 0, 0)])]).unwrap();
        assert_eq!(cse_from_charts(&one, 0).unwrap(), ChartExponent { beta: int(1), alpha: 2 });
        let two = ChartData::new(vec![Chart::new([(2, 1, 0), (3, 0, 0)])]).unwrap();
        assert_eq!(cse_from_charts(&two, 0).unwrap(), ChartExponent { beta: rat(1, 3), alpha: 1 });
        let tie = ChartData::new(vec![Chart::new([(1, 0, 0)]), Chart::new([(2, 1, 0)])]).unwrap();
        assert_eq!(cse_from_charts(&tie, 0).unwrap(), ChartExponent { beta: int(1), alpha: 1 });
    }

    #[test]
    fn invalid_charts_rejected() {
        assert_eq!(ChartData::new(vec![]), Err(ChartError::Empty));
        assert_eq!(ChartData::new(vec![Chart::new([(0, 1, 0)])]), Err(ChartError::NoVanishing(0)));
        assert!(matches!(
            ChartData::new(vec![Chart::new([(1, 0, 0)]), Chart::new([(1, 0, 0), (1, 0, 0)])]),
            Err(ChartError::LengthMismatch { .. })
        ));
        assert!(matches!(ChartData::from_json("[[[1,0]]]"), Err(ChartError::Json(_))));
    }

    #[test]
    fn json_shape() {
        let data = ChartData::from_json("[[[1,0,0],[1,0,0]],[[2,1,0],[1,0,1]]]").unwrap();
        assert_eq!(data.charts.len(), 2);
        assert_eq!(data.charts[1].entries[1], ChartEntry { a: 1, b: 0, c: 1 });
        assert_eq!(serde_json::to_string(&data).unwrap(), "[[[1,0,0],[1,0,0]],[[2,1,0],[1,0,1]]]");
    }

    #[test]
    fn laws() {
        let id = ChartData::new(vec![Chart::new([(1, 0, 0), (1, 0, 0)])]).unwrap();
        let l = chart_asymptotic(&id, 0).unwrap();
        assert_eq!((l.modf.power.clone(), l.modf.logpow), (int(2), 1));
        assert_eq!((l.imw.power.clone(), l.imw.logpow), (int(1), 1));
        let disc = ChartData::new(vec![Chart::new([(1, 0, 0)])]).unwrap();
        assert_eq!(chart_asymptotic(&disc, 0).unwrap().modf.power, int(2));
        let sq = ChartData::new(vec![Chart::new([(2, 0, 0), (2, 0, 0)])]).unwrap();
        let l = chart_asymptotic(&sq, 0).unwrap();
        assert_eq!((l.modf.power.clone(), l.modf.logpow), (int(1), 1));
    }

    #[test]
    fn itilde_closed_forms() {
        let v = itilde_exact(&Chart::new([(1, 0, 0)]), 0, 0.25).value;
        assert!((v - 0.03125).abs() < 1e-15);
        let v = itilde_exact(&Chart::new([(2, 0, 0)]), 0, 0.25).value;
        assert!((v - 0.125).abs() < 1e-15);
        for t in [1e-1, 1e-2, 1e-3, 1e-4] {
            let v = itilde_exact(&Chart::new([(1, 0, 0), (1, 0, 0)]), 0, t).value;
            let exact = t * t / 4.0 + t * t / 2.0 * (1.0 / t).ln();
            assert!(((v - exact) / exact).abs() < 1e-8, "t = {t}: {v} vs {exact}");
        }
    }

    #[test]
    fn itilde_at_one_is_the_full_product() {
        let chart = Chart::new([(1, 1, 0), (2, 0, 1), (3, 2, 0)]);
        let v = itilde_exact(&chart, 1, 1.0).value;
        assert!((v - 1.0 / (4.0 * 4.0 * 6.0)).abs() < 1e-15);
    }

    #[test]
    fn three_dimensional_matches_closed_form() {
        // t² Σ_{k<3} (2 ln 1/t)^k / (8 k!)
        let t: f64 = 1e-3;
        let v3 = itilde_exact(&Chart::new([(1, 0, 0), (1, 0, 0), (1, 0, 0)]), 0, t).value;
        let l = (1.0 / t).ln();
        let exact = t * t * (1.0 / 8.0 + l / 4.0 + l * l / 4.0);
        assert!(((v3 - exact) / exact).abs() < 1e-8, "{v3} vs {exact}");
    }

    #[test]
    fn quasi_monte_carlo_agrees_with_product_structure() {
        // four coordinates, one vanishing: Ĩ factorises into a 1D closed form
        let chart = Chart::new([(1, 0, 0), (0, 0, 0), (0, 1, 0), (0, 0, 0)]);
        let v = itilde_exact(&chart, 0, 0.1);
        assert_eq!(v.method, ItildeMethod::Quadrature);
        let expected = 0.1f64.powi(2) / 2.0 / 2.0 / 4.0 / 2.0;
        assert!((v.value - expected).abs() < 1e-14);

        let chart = Chart::new([(1, 0, 0), (1, 0, 0), (1, 0, 0), (1, 0, 0)]);
        let q = itilde_exact(&chart, 0, 0.5);
        assert_eq!(q.method, ItildeMethod::QuasiMonteCarlo);
        // t² Σ_{k<4} (2 ln 1/t)^k / (16 k!)
        let l = 2f64.ln();
        let exact = 0.25 * (1.0 / 16.0 + l / 8.0 + l * l / 8.0 + l.powi(3) / 12.0);
        assert!((q.value - exact).abs() < 5.0 * q.error.max(1e-6), "{} ± {} vs {exact}", q.value, q.error);
    }

    #[test]
    fn slope_fit_recovers_identity_law() {
        let grid = log_grid(1e-3, 1e-6, 10);
        let f = itilde_fit(&Chart::new([(1, 0, 0), (1, 0, 0)]), 0, &grid).unwrap();
        assert_eq!(f.logpow, 1);
        assert!((f.power - 2.0).abs() < 0.1);
    }
}
