use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SublevelFunction, VerifyError};
use crate::polyparse::RealSeries;

const WALK_CHUNK: u64 = 1024;
const MAX_STEPS: usize = 20_000;
const BISECTIONS: usize = 48;

/// A bounded planar domain, star-shaped about the origin.
pub trait StarDomain: Sync {
    fn contains(&self, x: f64, y: f64) -> bool;

    /// Radius of some disc about `(x, y)` inside the domain, no larger than
    /// `√2` times the distance to the boundary; zero outside.
    fn inscribed_radius(&self, x: f64, y: f64) -> f64;
}

/// A real series `ρ(x, y)` on `ℂ ≅ ℝ²` whose sublevel sets are bounded.
#[derive(Debug, Clone)]
pub struct PlanarSeries {
    series: RealSeries,
    terms: Vec<(i32, i32, f64)>,
}

impl PlanarSeries {
    pub fn new(series: RealSeries) -> Result<Self, VerifyError> {
        let keys: Vec<(u32, u32)> = series.terms().map(|(k, _)| *k).collect();
        if keys.contains(&(0, 0)) {
            return Err(VerifyError::BadModel("series must vanish at the origin".into()));
        }
        let pure_x = keys.iter().any(|&(a, b)| a > 0 && b == 0);
        let pure_y = keys.iter().any(|&(a, b)| a == 0 && b > 0);
        if !(pure_x && pure_y) {
            return Err(VerifyError::Unbounded);
        }
        let terms = series
            .terms()
            .map(|(&(a, b), c)| (a as i32, b as i32, crate::rational::to_f64(c)))
            .collect();
        Ok(Self { series, terms })
    }

    pub fn series(&self) -> &RealSeries {
        &self.series
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (x2, y2) = (x * x, y * y);
        self.terms.iter().map(|&(a, b, c)| c * x2.powi(a) * y2.powi(b)).sum()
    }

    /// `{ρ < t}`.
    pub fn sublevel(&self, t: f64) -> SeriesSublevel<'_> {
        SeriesSublevel { series: self, t }
    }

    /// Smallest radius of a disc about the origin containing `{ρ < t}`.
    pub fn enclosing_radius(&self, t: f64) -> f64 {
        let along = |dir: (f64, f64)| {
            let g = |s: f64| self.eval(s * dir.0, s * dir.1);
            solve_increasing(&g, t)
        };
        along((1.0, 0.0)).hypot(along((0.0, 1.0)))
    }
}

impl SublevelFunction for PlanarSeries {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, z: &[Complex64]) -> f64 {
        self.eval(z[0].re, z[0].im)
    }
}

/// Root of `g(s) = t` for `g` increasing on `[0, ∞)` with `g(0) < t`.
fn solve_increasing(g: &dyn Fn(f64) -> f64, t: f64) -> f64 {
    let mut hi = 1.0;
    while g(hi) < t {
        hi *= 2.0;
    }
    while g(hi * 0.5) >= t && hi > 1e-300 {
        hi *= 0.5;
    }
    let mut lo = hi * 0.5;
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if g(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesSublevel<'a> {
    series: &'a PlanarSeries,
    t: f64,
}

impl StarDomain for SeriesSublevel<'_> {
    fn contains(&self, x: f64, y: f64) -> bool {
        self.series.eval(x, y) < self.t
    }

    fn inscribed_radius(&self, x: f64, y: f64) -> f64 {
        // ρ increases in |x| and |y|, so the disc of radius r about (x, y)
        // stays inside while ρ(|x| + r, |y| + r) < t
        let (ax, ay) = (x.abs(), y.abs());
        if self.series.eval(ax, ay) >= self.t {
            return 0.0;
        }
        solve_increasing(&|r| self.series.eval(ax + r, ay + r), self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalRadius {
    pub radius: f64,
    pub log_radius: f64,
    pub log_stderr: f64,
    pub walks: u64,
    /// Walks stopped by the step cap before reaching the boundary layer.
    pub capped: u64,
}

/// Conformal radius `R` of a star-shaped domain at the origin, from
/// `log R = E[log |exit point|]` of planar Brownian motion started at the
/// origin, sampled by walk on spheres.
pub fn conformal_radius(domain: &dyn StarDomain, walks: u64, seed: u64) -> ConformalRadius {
    assert!(walks > 1);
    let r0 = domain.inscribed_radius(0.0, 0.0);
    assert!(r0 > 0.0, "origin must be interior");
    let eps = 1e-5 * r0;
    let chunks = walks.div_ceil(WALK_CHUNK);
    let parts: Vec<(f64, f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = WALK_CHUNK.min(walks - c * WALK_CHUNK);
            let (mut s1, mut s2, mut capped) = (0.0, 0.0, 0);
            for _ in 0..count {
                let (v, hit_cap) = walk(domain, &mut rng, eps);
                s1 += v;
                s2 += v * v;
                capped += hit_cap as u64;
            }
            (s1, s2, capped)
        })
        .collect();
    let (s1, s2, capped) = parts
        .iter()
        .fold((0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let n = walks as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    ConformalRadius {
        radius: mean.exp(),
        log_radius: mean,
        log_stderr: (var / n).sqrt(),
        walks,
        capped,
    }
}

fn walk(domain: &dyn StarDomain, rng: &mut ChaCha8Rng, eps: f64) -> (f64, bool) {
    let (mut x, mut y) = (0.0f64, 0.0f64);
    let mut capped = true;
    for _ in 0..MAX_STEPS {
        let r = domain.inscribed_radius(x, y);
        if r < eps {
            capped = false;
            break;
        }
        let angle = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        x += r * angle.cos();
        y += r * angle.sin();
    }
    // radial projection onto the boundary
    let norm = x.hypot(y);
    let (ux, uy) = (x / norm, y / norm);
    let mut lo = if domain.contains(x, y) { norm } else { 0.0 };
    let mut hi = norm.max(eps);
    while domain.contains(hi * ux, hi * uy) {
        hi *= 2.0;
    }
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if domain.contains(mid * ux, mid * uy) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo.ln(), capped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;
    use std::f64::consts::PI;

    struct Square(f64);

    impl StarDomain for Square {
        fn contains(&self, x: f64, y: f64) -> bool {
            x.abs() < self.0 && y.abs() < self.0
        }

        fn inscribed_radius(&self, x: f64, y: f64) -> f64 {
            (self.0 - x.abs()).min(self.0 - y.abs()).max(0.0)
        }
    }

    #[test]
    fn disc_sublevel() {
        let s = PlanarSeries::new(RealSeries::parse("x^2 + y^2").unwrap()).unwrap();
        let t: f64 = 1e-4;
        let c = conformal_radius(&s.sublevel(t), 4000, 3);
        // radial projection sends every exit point to the circle
        assert!((c.radius - t.sqrt()).abs() < 1e-9 * t.sqrt());
        assert!((s.enclosing_radius(t) - (2.0 * t).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn square_conformal_radius() {
        // square of side 2: the Schwarz–Christoffel map gives R = 8√π / Γ(1/4)²
        let exact = 8.0 * PI.sqrt() / gamma(0.25).powi(2);
        let c = conformal_radius(&Square(1.0), 40_000, 5);
        assert!((c.log_radius - exact.ln()).abs() < 4.0 * c.log_stderr + 1e-4, "{c:?} vs {exact}");
        assert_eq!(c.capped, 0);
    }

    #[test]
    fn walks_are_reproducible() {
        let a = conformal_radius(&Square(1.0), 3000, 9);
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| conformal_radius(&Square(1.0), 3000, 9));
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_unbounded_series() {
        let s = RealSeries::parse("x^4 y^2").unwrap();
        assert!(matches!(PlanarSeries::new(s), Err(VerifyError::Unbounded)));
    }
}
