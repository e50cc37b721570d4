use std::fmt::Write as _;
use std::io::Write as _;

use anyhow::Result;
use serde::{Deserialize, Serialize};

use cse_core::exponents::{AsymptoticLaw, RealSeriesReport, SingularityReport};
use cse_core::rational::format_pq;

use crate::config::{Format, RunConfig};
use crate::{ChartsOutput, NewtonOutput};

pub const SCHEMA: &str = "cse-kit/report/v1";

/// Versioned wrapper around every JSON result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    pub version: String,
    pub config: RunConfig,
    pub result: T,
}

/// Writes the result to stdout in the configured format.
pub fn emit<T: Serialize>(config: &RunConfig, result: &T, text: String, csv: String) -> Result<()> {
    let body = match config.format {
        Format::Json => {
            let env = Envelope {
                schema: SCHEMA.to_string(),
                version: cse_core::VERSION.to_string(),
                config: config.clone(),
                result,
            };
            serde_json::to_string_pretty(&env)? + "\n"
        }
        Format::Csv => csv,
        Format::Text => text,
    };
    std::io::stdout().write_all(body.as_bytes())?;
    Ok(())
}

pub fn csv_rows<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn law_row(name: &str, law: &AsymptoticLaw) -> Vec<String> {
    vec![
        name.to_string(),
        format_pq(&law.power),
        law.logpow.to_string(),
        law.variable.symbol().to_string(),
        law.epsilon_caveat.to_string(),
    ]
}

const LAW_HEADER: [&str; 5] = ["quantity", "power", "logpow", "variable", "epsilon"];

pub fn report_text(r: &SingularityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "map          {}", r.map.join("; "));
    let _ = writeln!(s, "base point   ({})", r.base_point.join(", "));
    let _ = writeln!(s, "route        {:?}", r.route);
    if let Some(v) = &r.nondegeneracy {
        let _ = writeln!(s, "newton       {}", v.label());
    }
    if let Some(d0) = &r.d0 {
        let _ = write!(s, "d0 = {d0}   ");
    }
    let _ = writeln!(s, "c0 = {}   lct = {}", r.c0, r.lct);
    let _ = write!(s, "m0 = {}", r.m0.value);
    if let (Some(faces), Some(codim)) = (r.m0.face_count, r.m0.codim) {
        let _ = write!(s, "   (face count {faces}, codimension {codim})");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{}", r.kernel.render("K"));
    let _ = writeln!(s, "{}", r.metric_normal.render("g_normal"));
    let _ = writeln!(s, "{}", r.volume.render("Vol"));
    let _ = writeln!(s, "  bounds: {} ... {}", r.volume_bounds.lower.render("Vol"), r.volume_bounds.upper.render("Vol"));
    for c in &r.coordinates {
        let _ = writeln!(s, "coordinate z{}", c.coordinate);
        let ds: Vec<String> = c.diagonals.iter().map(|d| format!("d{} = {}", d.tau, d.d)).collect();
        if !ds.is_empty() {
            let _ = writeln!(s, "  {}", ds.join("   "));
        }
        let _ = writeln!(s, "  c1 = {}   c2 = {}   m1 = {}   m2 = {}", c.c1, c.c2, c.m1.value, c.m2.value);
        let _ = writeln!(s, "  {}", c.metric_tangential.render("g_tan"));
        let _ = writeln!(s, "  {}   (E = {})", c.curvature.render("R - 2"), c.curvature_exponent);
        let v = &c.classification;
        let rel = if v.lhs < v.rhs { "<" } else if v.lhs == v.rhs { "=" } else { ">" };
        let _ = writeln!(
            s,
            "  classification {:?}: {} {rel} {}{}",
            v.class,
            v.lhs,
            v.rhs,
            if v.hypotheses_hold { "" } else { " (hypotheses not met)" }
        );
        if c.conjecture_relevant {
            let _ = writeln!(s, "  curvature tends to -infinity polynomially in the Bergman distance");
        }
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning [{}]: {}", serde_json::to_value(w.code).unwrap().as_str().unwrap_or(""), w.message);
    }
    s
}

pub fn report_csv(r: &SingularityReport) -> String {
    let mut rows = vec![
        law_row("kernel", &r.kernel),
        law_row("metric_normal", &r.metric_normal),
        law_row("volume", &r.volume),
    ];
    for c in &r.coordinates {
        rows.push(law_row(&format!("metric_tangential_z{}", c.coordinate), &c.metric_tangential));
        rows.push(law_row(&format!("curvature_z{}", c.coordinate), &c.curvature));
    }
    csv_rows(&LAW_HEADER, rows).unwrap_or_default()
}

pub fn real_series_text(r: &RealSeriesReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "series       {}", r.series);
    let _ = writeln!(s, "delta = {}   d0 = {}   c0 = {}   lct = {}", r.delta, r.d0, r.c0, r.lct);
    let _ = writeln!(s, "{}", r.kernel.render("K"));
    let _ = writeln!(s, "singularity-exponent prediction: {}", r.singularity_exponent_law.render("K"));
    if r.mismatch {
        let _ = writeln!(s, "d0 != delta: the kernel law is not governed by the singularity exponent");
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {}", w.message);
    }
    s
}

pub fn real_series_csv(r: &RealSeriesReport) -> String {
    let rows = vec![
        vec!["delta".to_string(), format_pq(&r.delta)],
        vec!["d0".to_string(), format_pq(&r.d0)],
        vec!["c0".to_string(), format_pq(&r.c0)],
        vec!["lct".to_string(), format_pq(&r.lct)],
        vec!["kernel_power".to_string(), format_pq(&r.kernel.power)],
        vec!["singularity_exponent_power".to_string(), format_pq(&r.singularity_exponent_law.power)],
        vec!["mismatch".to_string(), r.mismatch.to_string()],
    ];
    csv_rows(&["quantity", "value"], rows).unwrap_or_default()
}

fn tuple(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", parts.join(", "))
}

pub fn newton_text(o: &NewtonOutput) -> String {
    let mut s = String::new();
    let verts: Vec<String> = o.vertices.iter().map(|v| tuple(v)).collect();
    let _ = writeln!(s, "vertices ({}): {}", verts.len(), verts.join(" "));
    let _ = writeln!(s, "facets ({}):", o.facets.len());
    for f in &o.facets {
        let w: Vec<String> = f.normal.iter().map(|x| x.to_string()).collect();
        let kind = if f.is_compact() { "compact" } else { "unbounded" };
        let _ = writeln!(s, "  <({}), x> >= {}   {kind}", w.join(", "), f.offset);
    }
    let _ = writeln!(s, "compact faces: {}", o.compact_faces.len());
    for d in &o.diagonals {
        let q: Vec<String> = d.q.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(
            s,
            "tau = {} axis z{}: d = {}   Q = ({})   faces through Q = {}   codimension = {}",
            d.tau,
            d.axis + 1,
            d.d,
            q.join(", "),
            d.compact_face_count,
            d.minimal_face_codim
        );
    }
    if let Some(v) = &o.nondegeneracy {
        let _ = writeln!(s, "nondegeneracy: {}", v.label());
    }
    if let Some(r) = &o.real_series {
        let _ = writeln!(s, "real series: d0 = {}   delta = {}{}", r.d0, r.delta, if r.mismatch { "   (d0 != delta)" } else { "" });
    }
    s
}

pub fn newton_csv(o: &NewtonOutput) -> String {
    let rows = o.diagonals.iter().map(|d| {
        vec![
            d.tau.to_string(),
            (d.axis + 1).to_string(),
            format_pq(&d.d),
            d.compact_face_count.to_string(),
            d.minimal_face_codim.to_string(),
        ]
    });
    csv_rows(&["tau", "axis", "d", "face_count", "codim"], rows).unwrap_or_default()
}

pub fn charts_text(o: &ChartsOutput) -> String {
    let mut s = String::new();
    for t in &o.laws {
        let _ = writeln!(s, "tau = {}: beta = {}   alpha = {}", t.tau, t.laws.exponent.beta, t.laws.exponent.alpha);
        let _ = writeln!(s, "  {}", t.laws.modf.render("Vol{|F| < r}"));
        let _ = writeln!(s, "  {}", t.laws.imw.render("Vol{|F|^2 < Im w}"));
    }
    s
}

pub fn charts_csv(o: &ChartsOutput) -> String {
    let rows = o.laws.iter().map(|t| {
        vec![t.tau.to_string(), format_pq(&t.laws.exponent.beta), t.laws.exponent.alpha.to_string()]
    });
    csv_rows(&["tau", "beta", "alpha"], rows).unwrap_or_default()
}
