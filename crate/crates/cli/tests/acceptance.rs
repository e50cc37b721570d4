//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p cse-kit --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use cse_core::charts::{cse_from_charts, h_poles, itilde_exact, itilde_fit, log_grid, Chart, ChartData};
use cse_core::exponents::{assemble_report, cse_newton, CurvatureClass};
use cse_core::mc_verify::reinhardt_volume_exact;
use cse_core::newton::{diagonal_intersection, is_nondegenerate, polyhedron_of};
use cse_core::polyparse::{ExponentTuple, SparsePolynomial};
use cse_core::rational::{int, rat, to_f64};
use cse_core::scalar::Scalar;
use cse_core::Rational;

const EXAMPLE: &str = "z1^4 + z1^2*z2 + z1*z2^2 + z2^4";
const PLANAR_SERIES: &str = "x^8 + x^4 y^2 + x^2 y^6 + y^10";

type Outcome = Result<String, String>;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
    elapsed: Duration,
}

fn cse_kit(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_cse-kit")).args(args).output().expect("cse-kit runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        elapsed: start.elapsed(),
    }
}

fn json_result(run: &Run) -> Result<Value, String> {
    if run.code != 0 {
        return Err(format!("exit {}: {}", run.code, run.stderr.trim()));
    }
    let v: Value = serde_json::from_str(&run.stdout).map_err(|e| format!("bad JSON: {e}"))?;
    Ok(v["result"].clone())
}

fn expect(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn expect_str(v: &Value, want: &str, what: &str) -> Result<(), String> {
    expect(v.as_str() == Some(want), format!("{what}: got {v}, want {want}"))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Distance along `t·u` to `conv(S) + ℝ²₊`, by bisection on an independent
/// floating-point membership test.
fn planar_distance_by_bisection(u: [f64; 2], pts: &[[f64; 2]]) -> f64 {
    let member = |x: [f64; 2]| {
        let eps = 1e-12;
        if pts.iter().any(|s| s[0] <= x[0] + eps && s[1] <= x[1] + eps) {
            return true;
        }
        for (i, s) in pts.iter().enumerate() {
            for t in &pts[i + 1..] {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                let mut ok = true;
                for k in 0..2 {
                    let slope = s[k] - t[k];
                    let room = x[k] - t[k] + eps;
                    if slope > 0.0 {
                        hi = hi.min(room / slope);
                    } else if slope < 0.0 {
                        lo = lo.max(room / slope);
                    } else if room < 0.0 {
                        ok = false;
                    }
                }
                if ok && lo <= hi {
                    return true;
                }
            }
        }
        false
    };
    let (mut lo, mut hi) = (0.0, 64.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if member([mid * u[0], mid * u[1]]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn example_end_to_end() -> Outcome {
    let run = cse_kit(&["analyze", "--poly", EXAMPLE, "--format", "json"]);
    let r = json_result(&run)?;
    expect_str(&r["d0"], "3/2", "d0")?;
    expect_str(&r["c0"], "2/3", "c0")?;
    expect(r["m0"]["value"] == 1, format!("m0 = {}", r["m0"]))?;
    expect_str(&r["nondegeneracy"]["verdict"], "Nondegenerate", "nondegeneracy")?;
    for c in r["coordinates"].as_array().ok_or("no coordinates")? {
        let d = &c["diagonals"];
        expect_str(&d[0]["d"], "1/1", "d1")?;
        expect_str(&d[1]["d"], "4/5", "d2")?;
        let v = &c["classification"];
        expect_str(&v["class"], "tends_to_two", "classification")?;
        expect_str(&v["lhs"], "23/12", "inequality lhs")?;
        expect_str(&v["rhs"], "2/1", "inequality rhs")?;
    }
    let pts = [[4.0, 0.0], [2.0, 1.0], [1.0, 2.0], [0.0, 4.0]];
    for (tau, want) in [(0.0, 1.5), (1.0, 1.0), (2.0, 0.8)] {
        let got = planar_distance_by_bisection([1.0 + tau, 1.0], &pts);
        expect(close(got, want, 1e-9), format!("bisection d{tau} = {got}"))?;
    }
    expect(run.elapsed < Duration::from_secs(1), format!("took {:?}", run.elapsed))?;
    Ok(format!("d = 3/2, 1, 4/5; c0 = 2/3; 23/12 < 2; {:.0?}", run.elapsed))
}

fn planar_series() -> Outcome {
    let r = json_result(&cse_kit(&["analyze", "--real", "--series", PLANAR_SERIES, "--format", "json"]))?;
    expect_str(&r["d0"], "10/3", "d0")?;
    expect_str(&r["delta"], "3/1", "delta")?;
    expect(r["mismatch"] == true, "d0 != delta not flagged")?;
    let run = cse_kit(&["verify", "--real", "--series", PLANAR_SERIES, "--samples", "1000000", "--format", "json"]);
    let k = json_result(&run)?["kernel_check"].clone();
    let power = k["kernel_power"].as_f64().ok_or("no kernel power")?;
    expect(close(power, -7.0 / 3.0, 0.1), format!("kernel power {power}"))?;
    expect(k["alternative"]["preferred"] == false, format!("fit closer to {}", k["alternative"]["power"]))?;
    expect(run.elapsed < Duration::from_secs(120), format!("took {:?}", run.elapsed))?;
    Ok(format!("d0 = 10/3, delta = 3, kernel power {power:.3} vs -7/3 (not -2.3); {:.1?}", run.elapsed))
}

fn volume_fit(poly: &str, n: &str, samples: &str) -> Result<(f64, i64, Duration), String> {
    let run = cse_kit(&["verify", "--poly", poly, "-n", n, "--samples", samples, "--format", "json"]);
    let fit = json_result(&run)?["volume_fit"].clone();
    let p = fit["power"].as_f64().ok_or("no power")?;
    let q = fit["logpow"].as_i64().ok_or("no logpow")?;
    Ok((p, q, run.elapsed))
}

fn siegel_anchor() -> Outcome {
    let r = json_result(&cse_kit(&["analyze", "--poly", "z1", "-n", "1", "--format", "json"]))?;
    expect_str(&r["kernel"]["power"], "-3/1", "kernel power")?;
    expect(r["kernel"]["logpow"] == 0, "kernel log power")?;
    let c = &r["coordinates"][0];
    expect_str(&c["metric_tangential"]["power"], "-1/1", "tangential metric power")?;
    expect_str(&c["curvature_exponent"], "0/1", "curvature exponent")?;
    let (p, q, _) = volume_fit("z1", "1", "1000000")?;
    expect(close(p, 2.0, 0.05) && q == 0, format!("fit ({p}, {q})"))?;
    Ok(format!("K ~ r^-3, E = 0, fit ({p:.3}, {q})"))
}

fn log_order_adjudication() -> Outcome {
    let mut notes = Vec::new();
    for (poly, power) in [("z1*z2", 2.0), ("z1^2*z2^2", 1.0)] {
        let (p, q, t) = volume_fit(poly, "2", "10000000")?;
        expect(close(p, power, 0.05 * power) && q == 1, format!("{poly}: fit ({p}, {q})"))?;
        expect(t < Duration::from_secs(600), format!("{poly} took {t:?}"))?;
        notes.push(format!("{poly} ({p:.3}, {q})"));
    }
    Ok(notes.join(", "))
}

fn chart_engine() -> Outcome {
    let identity = Chart::new([(1, 0, 0), (1, 0, 0)]);
    for t in [1e-1, 1e-2, 1e-3, 1e-4] {
        let v = itilde_exact(&identity, 0, t).value;
        let exact = t * t / 4.0 + t * t / 2.0 * (1.0 / t).ln();
        expect(((v - exact) / exact).abs() < 1e-8, format!("t = {t}: {v} vs {exact}"))?;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("identity.json");
    std::fs::write(&file, "[[[1,0,0],[1,0,0]]]").map_err(|e| e.to_string())?;
    let r = json_result(&cse_kit(&["charts", "--charts", file.to_str().unwrap(), "--tau", "0", "--format", "json"]))?;
    expect_str(&r["laws"][0]["beta"], "1/1", "identity beta")?;
    expect(r["laws"][0]["alpha"] == 2, "identity alpha")?;

    let mut rng = ChaCha8Rng::seed_from_u64(0xc4a7);
    let grid = log_grid(1e-3, 1e-6, 13);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let tau = rng.random_range(0..=2);
        let chart = loop {
            let n = rng.random_range(1..=3);
            let c = Chart::new((0..n).map(|_| (rng.random_range(0..=3), rng.random_range(0..=2), rng.random_range(0..=1))));
            let poles = h_poles(&c, tau);
            if let Some(first) = poles.first() {
                if poles[1..].iter().all(|p| p.location >= &first.location + rat(1, 2)) {
                    break c;
                }
            }
        };
        let lead = cse_from_charts(&ChartData::new(vec![chart.clone()]).map_err(|e| e.to_string())?, tau)
            .map_err(|e| e.to_string())?;
        let fit = itilde_fit(&chart, tau, &grid).map_err(|e| e.to_string())?;
        let power = 2.0 * to_f64(&lead.beta);
        let rel = (fit.power - power).abs() / power;
        worst = worst.max(rel);
        expect(rel <= 0.05, format!("{chart:?}: power {} vs {power}", fit.power))?;
        expect(fit.logpow as usize == lead.alpha - 1, format!("{chart:?}: log power {}", fit.logpow))?;
    }
    Ok(format!("closed form to 1e-8; 5 random charts, worst relative power error {worst:.4}"))
}

fn newton_chart_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a0);
    let mut checked = 0;
    while checked < 20 {
        let n = rng.random_range(1..=3);
        let gamma: Vec<u32> = (0..n).map(|_| rng.random_range(0..=4)).collect();
        if gamma.iter().copied().max().unwrap() <= 1 {
            continue;
        }
        let f = SparsePolynomial::monomial(ExponentTuple(gamma.clone()), Scalar::one());
        let (c0, _) = cse_newton(&f).map_err(|e| e.to_string())?;
        let chart = cse_from_charts(&ChartData::new(vec![Chart::monomial(&gamma)]).unwrap(), 0).map_err(|e| e.to_string())?;
        expect(c0 == chart.beta, format!("{gamma:?}: {c0} vs {}", chart.beta))?;
        let codim = diagonal_intersection(&polyhedron_of(&f).map_err(|e| e.to_string())?, 0, 0).minimal_face_codim;
        expect(codim == chart.alpha, format!("{gamma:?}: codim {codim} vs {}", chart.alpha))?;
        checked += 1;
    }
    Ok("20 monomials agree exactly".into())
}

fn reinhardt_check() -> Outcome {
    use std::f64::consts::PI;
    for s in [0.5f64, 0.1, 0.01] {
        // Vol{|z1|² + |z2|⁴ < s²}
        let v = reinhardt_volume_exact(&[1, 2], s * s);
        let want = 2.0 / 3.0 * PI * PI * s.powi(3);
        expect(((v - want) / want).abs() < 1e-12, format!("closed form at s = {s}: {v} vs {want}"))?;
    }
    let run = cse_kit(&["verify", "--reinhardt", "1,2", "--rho-power", "0.5", "--format", "json"]);
    let k = json_result(&run)?["kernel_check"].clone();
    let power = k["kernel_power"].as_f64().ok_or("no kernel power")?;
    expect(close(power, -5.0, 0.1), format!("kernel power {power}"))?;
    let z: Vec<f64> = k["volume_z_scores"].as_array().ok_or("no z-scores")?.iter().filter_map(Value::as_f64).collect();
    let within = z.iter().filter(|z| z.abs() <= 3.0).count();
    expect(within == z.len(), format!("{within}/{} volumes within 3 sigma", z.len()))?;
    expect(k["lower_bound_holds"] == true, "K below 1/Vol")?;
    Ok(format!("kernel power {power:.4}, {within}/{} volumes within 3 sigma", z.len()))
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c4a);
    let origin = vec![Scalar::zero(); 2];
    let (mut cases, mut equalities) = (0, 0);
    while cases < 200 {
        let count = rng.random_range(1..=5);
        let terms: Vec<(ExponentTuple, Scalar)> = (0..count)
            .map(|_| {
                let e = vec![rng.random_range(0..=7u32), rng.random_range(0..=7u32)];
                let c = rng.random_range(1..=9i64) * if rng.random_bool(0.5) { 1 } else { -1 };
                (ExponentTuple(e), Scalar::from_rational(int(c)))
            })
            .collect();
        let f = SparsePolynomial::from_terms(2, terms);
        if f.is_zero() || !f.vanishes_at_origin() || !is_nondegenerate(&f).is_nondegenerate() {
            continue;
        }
        let Ok(report) = assemble_report(std::slice::from_ref(&f), &origin, None) else { continue };
        let poly = polyhedron_of(&f).map_err(|e| e.to_string())?;
        for axis in 0..2 {
            let d: Vec<Rational> = (0..3).map(|tau| diagonal_intersection(&poly, tau, axis).d).collect();
            expect(d[0] >= d[1] && d[1] >= d[2], format!("{f}: d not monotone"))?;
            let lhs = d[2].recip() + d[0].recip();
            let rhs = int(2) * d[1].recip();
            expect(lhs <= rhs, format!("{f}: convexity fails"))?;
            let c = report.coordinate(axis + 1).ok_or("missing coordinate")?;
            expect(int(2) * &c.c1 >= &report.c0 + &c.c2, format!("{f}: Schwarz fails"))?;
            let bounded = c.classification.class == CurvatureClass::BoundedBelow;
            expect((lhs == rhs) == bounded, format!("{f}: equality vs classification"))?;
            equalities += usize::from(lhs == rhs);
        }
        let (lambda, s1, s2) = (rng.random_range(1..=5i64), rng.random_range(1..=4i64), rng.random_range(1..=4i64));
        let scaled = SparsePolynomial::from_terms(
            2,
            f.terms().map(|(e, c)| {
                let factor = int(-lambda) * int(s1).pow(e.0[0] as i32) * int(s2).pow(e.0[1] as i32);
                (e.clone(), c * &Scalar::from_rational(factor))
            }),
        );
        let other = assemble_report(&[scaled], &origin, None).map_err(|e| e.to_string())?;
        expect(report.c0 == other.c0 && report.m0 == other.m0, format!("{f}: scaling changes c0/m0"))?;
        for (a, b) in report.coordinates.iter().zip(&other.coordinates) {
            expect(a.c1 == b.c1 && a.c2 == b.c2 && a.classification.class == b.classification.class, format!("{f}: scaling changes coordinate data"))?;
        }
        cases += 1;
    }
    Ok(format!("{cases} nondegenerate polynomials, {equalities} convexity equalities"))
}

fn negative_control() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = cse_kit(&["analyze", "--poly", "z1", "-n", "1", "--format", "json"]);
    expect(run.code == 0, "analyze failed")?;
    let mut report: Value = serde_json::from_str(&run.stdout).map_err(|e| e.to_string())?;
    let honest = dir.path().join("honest.json");
    std::fs::write(&honest, &run.stdout).map_err(|e| e.to_string())?;
    let c0: Rational = report["result"]["c0"].as_str().ok_or("no c0")?.parse().map_err(|_| "bad c0")?;
    report["result"]["c0"] = Value::String(format!("{}", c0 + rat(1, 2)));
    let corrupted = dir.path().join("corrupted.json");
    std::fs::write(&corrupted, report.to_string()).map_err(|e| e.to_string())?;

    let ok = cse_kit(&["verify", "--report", honest.to_str().unwrap()]);
    expect(ok.code == 0, format!("honest report exit {}", ok.code))?;
    let bad = cse_kit(&["verify", "--report", corrupted.to_str().unwrap()]);
    expect(bad.code == 3, format!("corrupted report exit {}", bad.code))?;
    expect(bad.stdout.contains("FAIL"), "failure table missing from stdout")?;
    Ok("honest report exit 0, c0 + 1/2 exit 3".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("worked example end to end", example_end_to_end),
        ("planar series kernel exponent", planar_series),
        ("Siegel anchor", siegel_anchor),
        ("log-order adjudication", log_order_adjudication),
        ("chart engine vs exact integral", chart_engine),
        ("Newton and chart routes agree", newton_chart_consistency),
        ("Reinhardt kernel and volume", reinhardt_check),
        ("distance and classification properties", property_suite),
        ("negative control", negative_control),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
