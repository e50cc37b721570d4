//! Singularity exponents, log orders and the boundary laws of the Bergman
//! kernel, metric and holomorphic sectional curvature on `Ω_F`.
//!
//! Conventions: `c0` is the square-integrability exponent (`|F|^{−c}` in
//! L²), so `lct = 2·c0`; on the Newton route `c0 = 1/d₀` and the weighted
//! exponents are `c_{τ,j} = 1/d_τ` with axis `j` weighted by `1+τ`. The
//! operative log order is the codimension of the smallest face through the
//! diagonal point; the compact-face count `min(m̂, n)` travels alongside.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charts::{cse_from_charts, ChartData, ChartError};
use crate::newton::{
    diagonal_intersection, nondegeneracy_of, polyhedron_of, DiagonalData, NewtonError, NewtonPolyhedron,
    Nondegeneracy,
};
use crate::polyparse::{recenter, ExponentTuple, RealSeries, SparsePolynomial};
use crate::rational::{int, serde_pq, serde_pq_opt, Rational};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitVariable {
    #[serde(rename = "r_to_0")]
    RToZero,
    #[serde(rename = "Imw_to_0")]
    ImwToZero,
}

impl LimitVariable {
    pub fn symbol(&self) -> &'static str {
        match self {
            LimitVariable::RToZero => "r",
            LimitVariable::ImwToZero => "Im w",
        }
    }
}

/// `A(x) ≍ x^power · |log x|^logpow` as `x → 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticLaw {
    #[serde(with = "serde_pq")]
    pub power: Rational,
    pub logpow: i64,
    pub variable: LimitVariable,
    /// The law only holds up to `x^{±ε}` for every `ε > 0`.
    #[serde(rename = "epsilon")]
    pub epsilon_caveat: bool,
}

impl AsymptoticLaw {
    pub fn new(power: Rational, logpow: i64, variable: LimitVariable) -> Self {
        Self { power, logpow, variable, epsilon_caveat: false }
    }

    pub fn with_epsilon(mut self) -> Self {
        self.epsilon_caveat = true;
        self
    }

    /// `K ≍ r^(-8/3) · |log r|^0`.
    pub fn render(&self, quantity: &str) -> String {
        let x = self.variable.symbol();
        let eps = if self.epsilon_caveat { " (up to ±ε in the power)" } else { "" };
        format!("{quantity} ≍ {x}^({}) · |log {x}|^{}{eps}", self.power, self.logpow)
    }
}

impl fmt::Display for AsymptoticLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("A"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExponentError {
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("{0}; supply resolution charts with --charts")]
    NeedsCharts(String),
    #[error("the map is constant near the base point")]
    ConstantMap,
    #[error("base point has {found} coordinates, expected {expected}")]
    BasePointDimension { expected: usize, found: usize },
    #[error("chart data has {found} coordinates, expected {expected}")]
    ChartDimension { expected: usize, found: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Log order under both conventions. `value` is the operative one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogOrder {
    pub value: usize,
    /// `min(m̂, n)` with `m̂` the number of compact faces through the point.
    pub face_count: Option<usize>,
    /// Codimension of the smallest face through the point.
    pub codim: Option<usize>,
}

impl LogOrder {
    fn from_diagonal(d: &DiagonalData, n: usize) -> Self {
        Self {
            value: d.minimal_face_codim,
            face_count: Some(d.compact_face_count.min(n)),
            codim: Some(d.minimal_face_codim),
        }
    }

    fn from_chart(alpha: usize) -> Self {
        Self { value: alpha, face_count: None, codim: None }
    }

    pub fn conventions_agree(&self) -> bool {
        self.face_count == self.codim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningCode {
    DistanceAtMostOne,
    NotNondegenerate,
    LogOrderConventionsDisagree,
    WeightedLogOrderInterpretation,
    ConjectureRelevant,
    ChartSingleCoordinate,
    ChartNewtonMismatch,
    ClassificationHypotheses,
    AxesNotMet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

impl Warning {
    fn new(code: WarningCode, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

fn newton_of(f: &SparsePolynomial) -> Result<NewtonPolyhedron, ExponentError> {
    if f.is_zero() {
        return Err(ExponentError::ConstantMap);
    }
    Ok(polyhedron_of(f)?)
}

/// `c0 = 1/d₀`, with warnings when the Newton formula is outside its
/// hypotheses.
pub fn cse_newton(f: &SparsePolynomial) -> Result<(Rational, Vec<Warning>), ExponentError> {
    let poly = newton_of(f)?;
    let d0 = diagonal_intersection(&poly, 0, 0).d;
    let mut warnings = Vec::new();
    if d0 <= Rational::one() {
        warnings.push(distance_warning(&d0));
    }
    let verdict = nondegeneracy_of(f, &poly);
    if !verdict.is_nondegenerate() {
        warnings.push(nondegeneracy_warning(&verdict));
    }
    Ok((d0.recip(), warnings))
}

fn distance_warning(d0: &Rational) -> Warning {
    Warning::new(
        WarningCode::DistanceAtMostOne,
        format!("Newton distance d0 = {d0} ≤ 1: the Newton-distance formula is used outside its hypothesis d0 > 1"),
    )
}

fn nondegeneracy_warning(verdict: &Nondegeneracy) -> Warning {
    Warning::new(
        WarningCode::NotNondegenerate,
        format!("nondegeneracy verdict is {}; Newton-polyhedron exponents are not valid", verdict.label()),
    )
}

/// `c_{τ,j} = 1/d_τ` with zero-based axis `j`.
pub fn weighted_cse_newton(f: &SparsePolynomial, axis: usize, tau: u32) -> Result<Rational, ExponentError> {
    Ok(diagonal_intersection(&newton_of(f)?, tau, axis).d.recip())
}

pub fn log_order(f: &SparsePolynomial, axis: usize, tau: u32) -> Result<LogOrder, ExponentError> {
    let d = diagonal_intersection(&newton_of(f)?, tau, axis);
    Ok(LogOrder::from_diagonal(&d, f.dim()))
}

/// Kernel law on `Ω_F`: `r^{−2−c0} |log r|^{1−l}`.
pub fn kernel_law(c0: &Rational, l: usize) -> AsymptoticLaw {
    AsymptoticLaw::new(int(-2) - c0, 1 - l as i64, LimitVariable::RToZero)
}

/// Kernel law on `Ω_ρ` for a log-psh `ρ`: `(Im w)^{−2−2c0(ρ)}` up to `ε`.
pub fn kernel_law_rho(c0_rho: &Rational) -> AsymptoticLaw {
    AsymptoticLaw::new(int(-2) - int(2) * c0_rho, 0, LimitVariable::ImwToZero).with_epsilon()
}

/// Metric coefficient in the normal direction.
pub fn metric_normal_law() -> AsymptoticLaw {
    AsymptoticLaw::new(int(-2), 0, LimitVariable::RToZero)
}

/// `Vol{|F| < r} ≍ r^{2c0} |log r|^{m0−1}`.
pub fn volume_law(c0: &Rational, m0: usize) -> AsymptoticLaw {
    AsymptoticLaw::new(int(2) * c0, m0 as i64 - 1, LimitVariable::RToZero)
}

/// The exponents that feed the metric and curvature laws of one coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateExponents {
    pub c0: Rational,
    pub m0: usize,
    pub c1: Rational,
    pub m1: usize,
    pub c2: Rational,
    pub m2: usize,
}

impl CoordinateExponents {
    /// `2c1 − c0 − c2`.
    pub fn curvature_exponent(&self) -> Rational {
        int(2) * &self.c1 - &self.c0 - &self.c2
    }
}

/// Tangential metric coefficient: `r^{−(c1−c0)} |log r|^{−(m1−m0)}`.
pub fn metric_law(e: &CoordinateExponents) -> AsymptoticLaw {
    AsymptoticLaw::new(
        -(&e.c1 - &e.c0),
        -(e.m1 as i64 - e.m0 as i64),
        LimitVariable::RToZero,
    )
}

/// `2 − R ≍ r^{2c1−c0−c2} |log r|^{2m1−m2−m0}`.
pub fn curvature_law(e: &CoordinateExponents) -> Result<AsymptoticLaw, ExponentError> {
    let power = e.curvature_exponent();
    if power.is_negative() {
        return Err(ExponentError::Internal(format!(
            "Schwarz inequality fails: 2·{} < {} + {}",
            e.c1, e.c0, e.c2
        )));
    }
    let logpow = 2 * e.m1 as i64 - e.m2 as i64 - e.m0 as i64;
    Ok(AsymptoticLaw::new(power, logpow, LimitVariable::RToZero))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureClass {
    /// `R → 2` in a non-tangential cone.
    TendsToTwo,
    /// `R` bounded below by a constant in a non-tangential cone.
    BoundedBelow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvatureVerdict {
    pub class: CurvatureClass,
    /// `1/d₂ + 1/d₀`.
    #[serde(with = "serde_pq")]
    pub lhs: Rational,
    /// `2/d₁`.
    #[serde(with = "serde_pq")]
    pub rhs: Rational,
    /// Nondegenerate with `d₀ > 1`; otherwise the verdict is advisory.
    pub hypotheses_hold: bool,
}

fn classify(c0: &Rational, c1: &Rational, c2: &Rational, hypotheses_hold: bool) -> CurvatureVerdict {
    let lhs = c2 + c0;
    let rhs = int(2) * c1;
    let class = if lhs < rhs { CurvatureClass::TendsToTwo } else { CurvatureClass::BoundedBelow };
    CurvatureVerdict { class, lhs, rhs, hypotheses_hold }
}

/// Exact test `1/d₂ + 1/d₀ < 2/d₁` along zero-based axis `j`.
pub fn curvature_classification(f: &SparsePolynomial, axis: usize) -> Result<CurvatureVerdict, ExponentError> {
    let poly = newton_of(f)?;
    let d: Vec<Rational> = (0..3).map(|tau| diagonal_intersection(&poly, tau, axis).d).collect();
    let hypotheses = d[0] > Rational::one() && nondegeneracy_of(f, &poly).is_nondegenerate();
    Ok(classify(&d[0].recip(), &d[1].recip(), &d[2].recip(), hypotheses))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Newton,
    Charts,
}

/// The volume bounds as stated for sublevel sets with a parameter. They
/// are correct but not sharp; [`SingularityReport::volume`] is sharp.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeBounds {
    pub lower: AsymptoticLaw,
    pub upper: AsymptoticLaw,
    pub note: String,
}

fn volume_bounds(c0: &Rational, l: usize) -> VolumeBounds {
    VolumeBounds {
        lower: AsymptoticLaw::new(c0.clone(), l as i64 - 1, LimitVariable::RToZero),
        upper: AsymptoticLaw::new(c0.clone(), 0, LimitVariable::RToZero).with_epsilon(),
        note: "non-sharp as printed: C r^c0 |log r|^(l-1) ≤ Vol ≤ C_ε r^(c0-ε); the sharp law is `volume`"
            .to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateReport {
    /// One-based coordinate index.
    pub coordinate: usize,
    #[serde(with = "serde_pq")]
    pub c1: Rational,
    #[serde(with = "serde_pq")]
    pub c2: Rational,
    pub m1: LogOrder,
    pub m2: LogOrder,
    /// Diagonal data for `τ = 1, 2` (Newton route only).
    pub diagonals: Vec<DiagonalData>,
    pub metric_tangential: AsymptoticLaw,
    pub curvature: AsymptoticLaw,
    #[serde(with = "serde_pq")]
    pub curvature_exponent: Rational,
    pub classification: CurvatureVerdict,
    /// Curvature exponent zero with a positive log power: `R → −∞`
    /// polynomially in the Bergman distance.
    pub conjecture_relevant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub dimension: usize,
    /// Components of `F(z0 + z) − F(z0)`.
    pub map: Vec<String>,
    pub base_point: Vec<String>,
    pub route: Route,
    #[serde(with = "serde_pq")]
    pub c0: Rational,
    #[serde(with = "serde_pq")]
    pub lct: Rational,
    #[serde(with = "serde_pq_opt")]
    pub d0: Option<Rational>,
    pub diagonal0: Option<DiagonalData>,
    pub m0: LogOrder,
    pub kernel: AsymptoticLaw,
    pub metric_normal: AsymptoticLaw,
    pub volume: AsymptoticLaw,
    pub volume_bounds: VolumeBounds,
    pub coordinates: Vec<CoordinateReport>,
    pub nondegeneracy: Option<Nondegeneracy>,
    pub warnings: Vec<Warning>,
}

impl SingularityReport {
    pub fn coordinate(&self, one_based: usize) -> Option<&CoordinateReport> {
        self.coordinates.iter().find(|c| c.coordinate == one_based)
    }

    pub fn has_warning(&self, code: WarningCode) -> bool {
        self.warnings.iter().any(|w| w.code == code)
    }
}

/// Full report for `F` at base point `z0`. A single nondegenerate component
/// uses the Newton route; anything else needs chart data.
pub fn assemble_report(
    map: &[SparsePolynomial],
    z0: &[Scalar],
    charts: Option<&ChartData>,
) -> Result<SingularityReport, ExponentError> {
    assert!(!map.is_empty(), "map needs at least one component");
    let n = map[0].dim();
    if z0.len() != n {
        return Err(ExponentError::BasePointDimension { expected: n, found: z0.len() });
    }
    let local = recenter(map, z0);
    let local: Vec<SparsePolynomial> = local.into_iter().filter(|f| !f.is_zero()).collect();
    if local.is_empty() {
        return Err(ExponentError::ConstantMap);
    }
    let map_text = local.iter().map(|f| f.to_string()).collect();
    let base_point = z0.iter().map(|s| s.to_string()).collect();

    if local.len() == 1 {
        let f = &local[0];
        let poly = newton_of(f)?;
        let verdict = nondegeneracy_of(f, &poly);
        if verdict.is_nondegenerate() {
            let mut report = newton_report(f, &poly, verdict)?;
            report.map = map_text;
            report.base_point = base_point;
            if let Some(charts) = charts {
                cross_check(&mut report, charts)?;
            }
            return Ok(report);
        }
        let Some(charts) = charts else {
            return Err(ExponentError::NeedsCharts(format!(
                "the Newton route needs a nondegenerate function (verdict: {})",
                verdict.label()
            )));
        };
        let mut report = chart_report(charts, n)?;
        report.warnings.insert(0, nondegeneracy_warning(&verdict));
        report.nondegeneracy = Some(verdict);
        report.map = map_text;
        report.base_point = base_point;
        return Ok(report);
    }
    let Some(charts) = charts else {
        return Err(ExponentError::NeedsCharts(format!(
            "maps with {} components have no Newton route",
            local.len()
        )));
    };
    let mut report = chart_report(charts, n)?;
    report.map = map_text;
    report.base_point = base_point;
    Ok(report)
}

fn coordinate_report(
    coordinate: usize,
    e: &CoordinateExponents,
    m1: LogOrder,
    m2: LogOrder,
    diagonals: Vec<DiagonalData>,
    hypotheses_hold: bool,
) -> Result<CoordinateReport, ExponentError> {
    let curvature = curvature_law(e)?;
    let exponent = e.curvature_exponent();
    Ok(CoordinateReport {
        coordinate,
        c1: e.c1.clone(),
        c2: e.c2.clone(),
        m1,
        m2,
        diagonals,
        metric_tangential: metric_law(e),
        conjecture_relevant: exponent.is_zero() && curvature.logpow > 0,
        curvature,
        classification: classify(&e.c0, &e.c1, &e.c2, hypotheses_hold),
        curvature_exponent: exponent,
    })
}

fn newton_report(
    f: &SparsePolynomial,
    poly: &NewtonPolyhedron,
    verdict: Nondegeneracy,
) -> Result<SingularityReport, ExponentError> {
    let n = f.dim();
    let diag0 = diagonal_intersection(poly, 0, 0);
    let d0 = diag0.d.clone();
    let c0 = d0.recip();
    let m0 = LogOrder::from_diagonal(&diag0, n);
    let mut warnings = Vec::new();
    let hypotheses = d0 > Rational::one();
    if !hypotheses {
        warnings.push(distance_warning(&d0));
    }
    let mut coordinates = Vec::with_capacity(n);
    let mut disagree = !m0.conventions_agree();
    for axis in 0..n {
        let d1 = diagonal_intersection(poly, 1, axis);
        let d2 = diagonal_intersection(poly, 2, axis);
        let m1 = LogOrder::from_diagonal(&d1, n);
        let m2 = LogOrder::from_diagonal(&d2, n);
        disagree |= !m1.conventions_agree() || !m2.conventions_agree();
        let e = CoordinateExponents {
            c0: c0.clone(),
            m0: m0.value,
            c1: d1.d.recip(),
            m1: m1.value,
            c2: d2.d.recip(),
            m2: m2.value,
        };
        coordinates.push(coordinate_report(axis + 1, &e, m1, m2, vec![d1, d2], hypotheses)?);
    }
    if disagree {
        warnings.push(Warning::new(
            WarningCode::LogOrderConventionsDisagree,
            "compact-face count and face codimension give different log orders; the codimension is used",
        ));
    }
    finish_warnings(&mut warnings, &coordinates);
    if !hypotheses {
        warnings.push(Warning::new(
            WarningCode::ClassificationHypotheses,
            "curvature classification is advisory: d0 > 1 fails",
        ));
    }
    Ok(SingularityReport {
        dimension: n,
        map: Vec::new(),
        base_point: Vec::new(),
        route: Route::Newton,
        lct: int(2) * &c0,
        kernel: kernel_law(&c0, m0.value),
        metric_normal: metric_normal_law(),
        volume: volume_law(&c0, m0.value),
        volume_bounds: volume_bounds(&c0, m0.value),
        c0,
        d0: Some(d0),
        diagonal0: Some(diag0),
        m0,
        coordinates,
        nondegeneracy: Some(verdict),
        warnings,
    })
}

fn finish_warnings(warnings: &mut Vec<Warning>, coordinates: &[CoordinateReport]) {
    warnings.push(Warning::new(
        WarningCode::WeightedLogOrderInterpretation,
        "metric and curvature log powers identify the unnamed integers with the weighted log orders m1, m2",
    ));
    for c in coordinates.iter().filter(|c| c.conjecture_relevant) {
        warnings.push(Warning::new(
            WarningCode::ConjectureRelevant,
            format!(
                "coordinate {}: curvature exponent 0 with log power {} > 0, so R → −∞ polynomially in the Bergman distance",
                c.coordinate, c.curvature.logpow
            ),
        ));
    }
}

fn chart_report(charts: &ChartData, n: usize) -> Result<SingularityReport, ExponentError> {
    if charts.dim() != n {
        return Err(ExponentError::ChartDimension { expected: n, found: charts.dim() });
    }
    let e0 = cse_from_charts(charts, 0)?;
    let e1 = cse_from_charts(charts, 1)?;
    let e2 = cse_from_charts(charts, 2)?;
    let c0 = e0.beta.clone();
    let m0 = LogOrder::from_chart(e0.alpha);
    let e = CoordinateExponents {
        c0: c0.clone(),
        m0: e0.alpha,
        c1: e1.beta,
        m1: e1.alpha,
        c2: e2.beta,
        m2: e2.alpha,
    };
    let coordinates = vec![coordinate_report(
        1,
        &e,
        LogOrder::from_chart(e1.alpha),
        LogOrder::from_chart(e2.alpha),
        Vec::new(),
        true,
    )?];
    let mut warnings = vec![Warning::new(
        WarningCode::ChartSingleCoordinate,
        "chart data carries one distinguished coordinate; laws are reported for z1 only",
    )];
    finish_warnings(&mut warnings, &coordinates);
    Ok(SingularityReport {
        dimension: n,
        map: Vec::new(),
        base_point: Vec::new(),
        route: Route::Charts,
        lct: int(2) * &c0,
        kernel: kernel_law(&c0, m0.value),
        metric_normal: metric_normal_law(),
        volume: volume_law(&c0, m0.value),
        volume_bounds: volume_bounds(&c0, m0.value),
        c0,
        d0: None,
        diagonal0: None,
        m0,
        coordinates,
        nondegeneracy: None,
        warnings,
    })
}

fn cross_check(report: &mut SingularityReport, charts: &ChartData) -> Result<(), ExponentError> {
    let e0 = cse_from_charts(charts, 0)?;
    if e0.beta != report.c0 || e0.alpha != report.m0.value {
        report.warnings.push(Warning::new(
            WarningCode::ChartNewtonMismatch,
            format!(
                "charts give c0 = {}, m0 = {}; the Newton route gives c0 = {}, m0 = {}",
                e0.beta, e0.alpha, report.c0, report.m0.value
            ),
        ));
    }
    Ok(())
}

/// Planar real series `ρ = Σ c_γ x^{2γ₁} y^{2γ₂}` on `ℂ`, `z = x + iy`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealSeriesReport {
    pub series: String,
    /// Smallest total halved degree `|γ|`.
    #[serde(with = "serde_pq")]
    pub delta: Rational,
    /// Newton distance of the real exponents.
    #[serde(with = "serde_pq")]
    pub d0: Rational,
    pub diagonal0: DiagonalData,
    /// `sup{c : ρ^{−c} ∈ L²}` = `1/(2 d0)`.
    #[serde(with = "serde_pq")]
    pub c0: Rational,
    /// `1/d0`.
    #[serde(with = "serde_pq")]
    pub lct: Rational,
    /// `(Im w)^{−2−1/δ}`: the actual kernel law on `Ω_ρ`.
    pub kernel: AsymptoticLaw,
    /// `(Im w)^{−2−2c0}`: what the log-psh law would predict.
    pub singularity_exponent_law: AsymptoticLaw,
    /// `d0 ≠ δ`, so the two laws differ.
    pub mismatch: bool,
    pub warnings: Vec<Warning>,
}

pub fn real_series_report(series: &RealSeries) -> Result<RealSeriesReport, ExponentError> {
    let supports: Vec<ExponentTuple> = series.real_supports();
    let poly = crate::newton::build_polyhedron(&supports, 2)?;
    let diagonal0 = diagonal_intersection(&poly, 0, 0);
    let d0 = diagonal0.d.clone();
    let delta = series.delta();
    let c0 = (int(2) * &d0).recip();
    let mut warnings = Vec::new();
    let meets_x = supports.iter().any(|e| e.0[1] == 0);
    let meets_y = supports.iter().any(|e| e.0[0] == 0);
    if !(meets_x && meets_y) {
        warnings.push(Warning::new(
            WarningCode::AxesNotMet,
            "the Newton polyhedron does not meet both axes; c0 = 1/(2 d0) may fail",
        ));
    }
    Ok(RealSeriesReport {
        series: series.to_string(),
        kernel: AsymptoticLaw::new(series.kernel_exponent(), 0, LimitVariable::ImwToZero),
        singularity_exponent_law: kernel_law_rho(&c0),
        mismatch: d0 != delta,
        lct: d0.recip(),
        delta,
        d0,
        diagonal0,
        c0,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyparse::parse_poly;
    use crate::rational::rat;

    const EXAMPLE: &str = "z1^4 + z1^2*z2 + z1*z2^2 + z2^4";

    fn p(text: &str, n: usize) -> SparsePolynomial {
        parse_poly(text, n).unwrap()
    }

    fn origin(n: usize) -> Vec<Scalar> {
        vec![Scalar::zero(); n]
    }

    #[test]
    fn singularity_exponents() {
        assert_eq!(cse_newton(&p(EXAMPLE, 2)).unwrap().0, rat(2, 3));
        assert_eq!(cse_newton(&p("z1", 1)).unwrap().0, int(1));
        assert_eq!(cse_newton(&p("z1^2", 1)).unwrap().0, rat(1, 2));
        assert_eq!(weighted_cse_newton(&p("z1", 1), 0, 1).unwrap(), int(2));
        assert_eq!(weighted_cse_newton(&p(EXAMPLE, 2), 0, 1).unwrap(), int(1));
        assert_eq!(weighted_cse_newton(&p(EXAMPLE, 2), 0, 2).unwrap(), rat(5, 4));
    }

    #[test]
    fn distance_warning_for_smooth_points() {
        let (c0, w) = cse_newton(&p("z1", 1)).unwrap();
        assert_eq!(c0, int(1));
        assert_eq!(w[0].code, WarningCode::DistanceAtMostOne);
    }

    #[test]
    fn log_orders() {
        let m = log_order(&p(EXAMPLE, 2), 0, 0).unwrap();
        assert_eq!((m.face_count, m.codim), (Some(1), Some(1)));
        let m = log_order(&p("z1^2 z2^2", 2), 0, 0).unwrap();
        assert_eq!((m.face_count, m.codim, m.value), (Some(1), Some(2), 2));
        let m = log_order(&p("z1", 1), 0, 0).unwrap();
        assert_eq!((m.face_count, m.codim), (Some(1), Some(1)));
    }

    #[test]
    fn kernel_laws() {
        assert_eq!(kernel_law(&int(1), 1), AsymptoticLaw::new(int(-3), 0, LimitVariable::RToZero));
        assert_eq!(kernel_law(&rat(2, 3), 1).power, rat(-8, 3));
        let rho = kernel_law_rho(&rat(3, 2));
        assert_eq!(rho.power, int(-5));
        assert!(rho.epsilon_caveat);
        assert_eq!(kernel_law(&rat(2, 3), 1).render("K"), "K ≍ r^(-8/3) · |log r|^0");
    }

    #[test]
    fn metric_and_curvature() {
        let siegel = CoordinateExponents { c0: int(1), m0: 1, c1: int(2), m1: 1, c2: int(3), m2: 1 };
        assert_eq!(metric_law(&siegel).power, int(-1));
        let k = curvature_law(&siegel).unwrap();
        assert_eq!((k.power, k.logpow), (int(0), 0));

        let example = CoordinateExponents { c0: rat(2, 3), m0: 1, c1: int(1), m1: 2, c2: rat(5, 4), m2: 1 };
        let g = metric_law(&example);
        assert_eq!((g.power, g.logpow), (rat(-1, 3), -1));
        let k = curvature_law(&example).unwrap();
        assert_eq!((k.power, k.logpow), (rat(1, 12), 2));

        let square = CoordinateExponents { c0: rat(1, 2), m0: 1, c1: int(1), m1: 1, c2: int(3), m2: 1 };
        assert!(matches!(curvature_law(&square), Err(ExponentError::Internal(_))));
    }

    #[test]
    fn classifications() {
        let v = curvature_classification(&p(EXAMPLE, 2), 0).unwrap();
        assert_eq!(v.class, CurvatureClass::TendsToTwo);
        assert_eq!((v.lhs.clone(), v.rhs.clone()), (rat(23, 12), int(2)));
        assert!(v.hypotheses_hold);
        let v = curvature_classification(&p("z1^4 + z2^4", 2), 0).unwrap();
        assert_eq!(v.class, CurvatureClass::BoundedBelow);
        assert_eq!(v.lhs, v.rhs);
        for a in 1..6 {
            let v = curvature_classification(&p(&format!("z1^{a}"), 1), 0).unwrap();
            assert_eq!(v.class, CurvatureClass::BoundedBelow);
            assert_eq!(v.lhs, rat(4, a));
        }
    }

    #[test]
    fn example_report() {
        let r = assemble_report(&[p(EXAMPLE, 2)], &origin(2), None).unwrap();
        assert_eq!(r.route, Route::Newton);
        assert_eq!(r.c0, rat(2, 3));
        assert_eq!(r.lct, rat(4, 3));
        assert_eq!(r.m0.value, 1);
        assert_eq!(r.kernel.power, rat(-8, 3));
        let c = r.coordinate(1).unwrap();
        assert_eq!((c.c1.clone(), c.c2.clone()), (int(1), rat(5, 4)));
        assert_eq!(c.curvature_exponent, rat(1, 12));
        assert_eq!(c.classification.class, CurvatureClass::TendsToTwo);
        assert!(r.nondegeneracy.as_ref().unwrap().is_nondegenerate());
        assert!(!r.has_warning(WarningCode::DistanceAtMostOne));
    }

    #[test]
    fn siegel_report() {
        let r = assemble_report(&[p("z1", 1)], &origin(1), None).unwrap();
        assert_eq!(r.kernel, AsymptoticLaw::new(int(-3), 0, LimitVariable::RToZero));
        let c = r.coordinate(1).unwrap();
        assert_eq!(c.metric_tangential.power, int(-1));
        assert_eq!(c.curvature_exponent, int(0));
        assert_eq!(r.volume, AsymptoticLaw::new(int(2), 0, LimitVariable::RToZero));
    }

    #[test]
    fn recentered_smooth_point() {
        let z0 = vec![Scalar::one()];
        let r = assemble_report(&[p("z1^2", 1)], &z0, None).unwrap();
        assert_eq!(r.c0, int(1));
        assert_eq!(r.map, vec!["z1^2 + 2*z1".to_string()]);
        assert!(r.has_warning(WarningCode::DistanceAtMostOne));
    }

    #[test]
    fn degenerate_needs_charts() {
        let f = p("z1^2 + 2 z1 z2 + z2^2", 2);
        assert!(matches!(assemble_report(&[f.clone()], &origin(2), None), Err(ExponentError::NeedsCharts(_))));
        // (z1 + z2)² in coordinates u = z1 + z2: one chart a = (2, 0)
        let charts = ChartData::new(vec![crate::charts::Chart::new([(2, 0, 1), (0, 0, 0)])]).unwrap();
        let r = assemble_report(&[f], &origin(2), Some(&charts)).unwrap();
        assert_eq!(r.route, Route::Charts);
        assert_eq!(r.c0, rat(1, 2));
        assert!(r.has_warning(WarningCode::NotNondegenerate));
    }

    #[test]
    fn maps_need_charts() {
        let map = [p("z1", 2), p("z2", 2)];
        assert!(matches!(assemble_report(&map, &origin(2), None), Err(ExponentError::NeedsCharts(_))));
        let charts = ChartData::new(vec![crate::charts::Chart::new([(1, 1, 1), (1, 0, 0)])]).unwrap();
        let r = assemble_report(&map, &origin(2), Some(&charts)).unwrap();
        assert_eq!(r.c0, int(1));
    }

    #[test]
    fn constant_map_rejected() {
        let f = p("z1 - z1 + 1", 1);
        assert_eq!(assemble_report(&[f], &origin(1), None), Err(ExponentError::ConstantMap));
    }

    #[test]
    fn monomial_square_uses_codimension() {
        let r = assemble_report(&[p("z1^2 z2^2", 2)], &origin(2), None).unwrap();
        assert_eq!(r.m0.value, 2);
        assert_eq!(r.volume, AsymptoticLaw::new(int(1), 1, LimitVariable::RToZero));
        assert!(r.has_warning(WarningCode::LogOrderConventionsDisagree));
    }

    #[test]
    fn planar_series() {
        let s = RealSeries::parse("x^8 + x^4 y^2 + x^2 y^6 + y^10").unwrap();
        let r = real_series_report(&s).unwrap();
        assert_eq!(r.delta, int(3));
        assert_eq!(r.d0, rat(10, 3));
        assert_eq!(r.c0, rat(3, 20));
        assert_eq!(r.kernel.power, rat(-7, 3));
        assert_eq!(r.singularity_exponent_law.power, rat(-23, 10));
        assert!(r.mismatch);
        let siegel = real_series_report(&RealSeries::parse("x^2 + y^2").unwrap()).unwrap();
        assert!(!siegel.mismatch);
        assert_eq!(siegel.kernel.power, int(-3));
        assert_eq!(siegel.singularity_exponent_law.power, int(-3));
    }

    #[test]
    fn report_json_round_trip() {
        let r = assemble_report(&[p(EXAMPLE, 2)], &origin(2), None).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"c0\":\"2/3\""));
        let back: SingularityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
