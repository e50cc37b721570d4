//! Kouchnirenko nondegeneracy: for every compact face `Δ`, the face
//! polynomial `f_Δ` has no critical point on the torus `(ℂ*)ⁿ`.
//!
//! Vertices never fail. Edges reduce to a univariate polynomial `P` along
//! the primitive edge direction, and fail exactly when `P` has a repeated
//! root (`P(0) ≠ 0` always holds). Faces whose support exponents are
//! linearly independent cannot fail either. Everything else gets a seeded
//! multistart Levenberg–Marquardt search for a torus critical point.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::faces::{enumerate_compact_faces, Face};
use super::{exponent_to_rational, polyhedron_of, NewtonPolyhedron};
use crate::polyparse::{ExponentTuple, SparsePolynomial};
use crate::rational::{primitive, rank, serde_pq_vec, Rational};
use crate::scalar::{GaussianRational, Scalar};

/// Normalized residual below which a numerical critical point is accepted.
pub const CRITICAL_RESIDUAL: f64 = 1e-10;
const STARTS: usize = 48;
const ITERATIONS: usize = 200;
const SEED: u64 = 0x6e6f6e646567;
/// Points whose log-moduli spread further than this are treated as lying at
/// the boundary of the torus.
const MAX_LOG_SPREAD: f64 = 25.0;

/// The face on which a verdict was reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceWitness {
    #[serde(with = "serde_pq_vec")]
    pub normal: Vec<Rational>,
    pub vertices: Vec<Vec<u32>>,
    pub dim: usize,
    pub face_polynomial: String,
    /// Best normalized residual of the numerical search, when one ran.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "face")]
pub enum Nondegeneracy {
    Nondegenerate,
    Degenerate(FaceWitness),
    Unknown(FaceWitness),
}

impl Nondegeneracy {
    pub fn is_nondegenerate(&self) -> bool {
        matches!(self, Nondegeneracy::Nondegenerate)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Nondegeneracy::Nondegenerate => "nondegenerate",
            Nondegeneracy::Degenerate(_) => "degenerate",
            Nondegeneracy::Unknown(_) => "unknown",
        }
    }
}

/// Verdict for `f` (which must vanish at the origin and be nonzero).
pub fn is_nondegenerate(f: &SparsePolynomial) -> Nondegeneracy {
    let poly = polyhedron_of(f).expect("f must be nonzero with f(0) = 0");
    nondegeneracy_of(f, &poly)
}

/// Like [`is_nondegenerate`] with a precomputed polyhedron. A degenerate
/// face takes precedence over an undecided one.
pub fn nondegeneracy_of(f: &SparsePolynomial, poly: &NewtonPolyhedron) -> Nondegeneracy {
    let mut unknown = None;
    for face in enumerate_compact_faces(poly) {
        if face.dim == 0 {
            continue;
        }
        let terms: Vec<(ExponentTuple, Scalar)> = f
            .terms()
            .filter(|(e, _)| face.contains(&exponent_to_rational(&e.0)))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        match face_verdict(&face, &terms) {
            FaceVerdict::Clear => {}
            FaceVerdict::Critical(residual) => {
                return Nondegeneracy::Degenerate(witness(&face, &terms, f.dim(), residual))
            }
            FaceVerdict::Undecided(residual) => {
                if unknown.is_none() {
                    unknown = Some(witness(&face, &terms, f.dim(), Some(residual)));
                }
            }
        }
    }
    match unknown {
        Some(w) => Nondegeneracy::Unknown(w),
        None => Nondegeneracy::Nondegenerate,
    }
}

fn witness(face: &Face, terms: &[(ExponentTuple, Scalar)], n: usize, residual: Option<f64>) -> FaceWitness {
    FaceWitness {
        normal: face.normal.clone(),
        vertices: face.vertices.clone(),
        dim: face.dim,
        face_polynomial: SparsePolynomial::from_terms(n, terms.iter().cloned()).to_string(),
        residual,
    }
}

enum FaceVerdict {
    Clear,
    Critical(Option<f64>),
    Undecided(f64),
}

fn face_verdict(face: &Face, terms: &[(ExponentTuple, Scalar)]) -> FaceVerdict {
    let exps: Vec<Vec<Rational>> = terms.iter().map(|(e, _)| exponent_to_rational(&e.0)).collect();
    if rank(&exps) == exps.len() {
        return FaceVerdict::Clear;
    }
    if face.dim == 1 {
        return if edge_has_repeated_root(terms) {
            FaceVerdict::Critical(None)
        } else {
            FaceVerdict::Clear
        };
    }
    let residual = search_critical_point(terms, &face.normal);
    if residual < CRITICAL_RESIDUAL {
        FaceVerdict::Critical(Some(residual))
    } else {
        FaceVerdict::Undecided(residual)
    }
}

/// Writes `f_Δ = z^v · P(z^e)` with `e` the primitive edge direction and
/// decides whether `P` has a repeated root.
fn edge_has_repeated_root(terms: &[(ExponentTuple, Scalar)]) -> bool {
    let origin = &terms.iter().min_by(|a, b| a.0.cmp(&b.0)).unwrap().0;
    let offsets: Vec<Vec<BigInt>> = terms
        .iter()
        .map(|(e, _)| e.0.iter().zip(&origin.0).map(|(&a, &b)| BigInt::from(a) - BigInt::from(b)).collect())
        .collect();
    // any nonzero offset spans the edge line; normalize orientation so the
    // origin term sits at P's constant coefficient
    let mut dir = offsets.iter().find(|o| o.iter().any(|x| !x.is_zero())).unwrap().clone();
    primitive(&mut dir);
    let pivot = dir.iter().position(|x| !x.is_zero()).unwrap();
    let steps: Vec<i64> = offsets.iter().map(|o| (&o[pivot] / &dir[pivot]).to_i64().unwrap()).collect();
    let shift = *steps.iter().min().unwrap();
    let degree = (steps.iter().max().unwrap() - shift) as usize;

    if terms.iter().all(|(_, c)| c.is_exact()) {
        let mut p = vec![GaussianRational::real(Rational::zero()); degree + 1];
        for ((_, c), s) in terms.iter().zip(&steps) {
            p[(s - shift) as usize] = c.as_exact().unwrap().clone();
        }
        exact_gcd_degree(&p, &exact_derivative(&p)) > 0
    } else {
        let mut p = vec![Complex64::zero(); degree + 1];
        for ((_, c), s) in terms.iter().zip(&steps) {
            p[(s - shift) as usize] = c.to_complex();
        }
        float_gcd_degree(&p, &float_derivative(&p)) > 0
    }
}

fn exact_derivative(p: &[GaussianRational]) -> Vec<GaussianRational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * &GaussianRational::real(Rational::from_integer(BigInt::from(k))))
        .collect()
}

fn trim_exact(p: &mut Vec<GaussianRational>) {
    while p.last().is_some_and(GaussianRational::is_zero) {
        p.pop();
    }
}

fn exact_remainder(a: &[GaussianRational], b: &[GaussianRational]) -> Vec<GaussianRational> {
    let mut r = a.to_vec();
    trim_exact(&mut r);
    let lead_inv = b.last().unwrap().inv().unwrap();
    while r.len() >= b.len() {
        let q = r.last().unwrap() * &lead_inv;
        let off = r.len() - b.len();
        for (k, bk) in b.iter().enumerate() {
            r[off + k] = &r[off + k] - &(&q * bk);
        }
        r.pop();
        trim_exact(&mut r);
    }
    r
}

/// Degree of `gcd(a, b)` over `ℚ(i)`.
fn exact_gcd_degree(a: &[GaussianRational], b: &[GaussianRational]) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim_exact(&mut a);
    trim_exact(&mut b);
    while !b.is_empty() {
        let r = exact_remainder(&a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

fn float_derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

fn max_abs(p: &[Complex64]) -> f64 {
    p.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn trim_float(p: &mut Vec<Complex64>, scale: f64) {
    while p.last().is_some_and(|c| c.norm() <= 1e-9 * scale) {
        p.pop();
    }
}

/// Degree of an approximate gcd: Euclid with relative coefficient tolerance.
fn float_gcd_degree(a: &[Complex64], b: &[Complex64]) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let sa = max_abs(&a);
    let sb = max_abs(&b);
    trim_float(&mut a, sa);
    trim_float(&mut b, sb);
    while !b.is_empty() {
        let scale = max_abs(&b);
        let b_unit: Vec<Complex64> = b.iter().map(|c| c / scale).collect();
        let mut r: Vec<Complex64> = a.iter().map(|c| c / scale).collect();
        let lead = *b_unit.last().unwrap();
        while r.len() >= b_unit.len() {
            let q = r.last().unwrap() / lead;
            let off = r.len() - b_unit.len();
            for (k, bk) in b_unit.iter().enumerate() {
                r[off + k] -= q * bk;
            }
            r.pop();
        }
        let reference = (max_abs(&a) / scale).max(1.0);
        trim_float(&mut r, reference);
        a = b_unit;
        b = r;
    }
    a.len().saturating_sub(1)
}

/// Smallest normalized residual of `z_i ∂f_Δ/∂z_i` found on the torus.
/// Works in log coordinates `z = exp(ζ)`, where the system is
/// `g_i(ζ) = Σ γ_i c_γ exp⟨γ, ζ⟩`. The face is quasi-homogeneous, so
/// solutions come in orbits `ζ + s·w`; the extra equation `⟨w, ζ⟩ = 0`
/// picks one point per orbit.
fn search_critical_point(terms: &[(ExponentTuple, Scalar)], normal: &[Rational]) -> f64 {
    let n = normal.len();
    let exps: Vec<Vec<f64>> = terms.iter().map(|(e, _)| e.0.iter().map(|&v| v as f64).collect()).collect();
    let coeffs: Vec<Complex64> = terms.iter().map(|(_, c)| c.to_complex()).collect();
    let weight: Vec<f64> = normal.iter().map(crate::rational::to_f64).collect();
    let problem = LogSystem { exps: &exps, coeffs: &coeffs, weight: &weight, n };

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut best = f64::INFINITY;
    for _ in 0..STARTS {
        let mut zeta: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::new(
                    rng.random_range(-1.5..1.5),
                    rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
                )
            })
            .collect();
        let mut lambda = 1e-3;
        let (mut r, mut jac) = problem.eval(&zeta);
        let mut cost = norm_sqr(&r);
        for _ in 0..ITERATIONS {
            let Some(step) = lm_step(&jac, &r, lambda) else {
                break;
            };
            let trial: Vec<Complex64> = zeta.iter().zip(&step).map(|(z, s)| z + s).collect();
            let (r_trial, jac_trial) = problem.eval(&trial);
            let trial_cost = norm_sqr(&r_trial);
            if trial_cost.is_finite() && trial_cost < cost {
                zeta = trial;
                r = r_trial;
                jac = jac_trial;
                cost = trial_cost;
                lambda = (lambda * 0.3).max(1e-15);
            } else {
                lambda *= 10.0;
                if lambda > 1e12 {
                    break;
                }
            }
            if problem.normalized_residual(&zeta, &r[..n]) < CRITICAL_RESIDUAL * 1e-3 {
                break;
            }
        }
        let spread = zeta.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
            - zeta.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if spread <= MAX_LOG_SPREAD {
            best = best.min(problem.normalized_residual(&zeta, &r[..n]));
        }
        if best < CRITICAL_RESIDUAL {
            break;
        }
    }
    best
}

struct LogSystem<'a> {
    exps: &'a [Vec<f64>],
    coeffs: &'a [Complex64],
    weight: &'a [f64],
    n: usize,
}

impl LogSystem<'_> {
    fn monomials(&self, zeta: &[Complex64]) -> Vec<Complex64> {
        self.exps
            .iter()
            .zip(self.coeffs)
            .map(|(e, c)| c * e.iter().zip(zeta).map(|(a, z)| z * a).sum::<Complex64>().exp())
            .collect()
    }

    /// Residual `(g, ⟨w, ζ⟩)` and its `(n+1) × n` Jacobian.
    fn eval(&self, zeta: &[Complex64]) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
        let n = self.n;
        let m = self.monomials(zeta);
        let mut r = vec![Complex64::zero(); n + 1];
        let mut jac = vec![vec![Complex64::zero(); n]; n + 1];
        for (e, t) in self.exps.iter().zip(&m) {
            for i in 0..n {
                r[i] += t * e[i];
                for k in 0..n {
                    jac[i][k] += t * (e[i] * e[k]);
                }
            }
        }
        r[n] = zeta.iter().zip(self.weight).map(|(z, w)| z * w).sum();
        for k in 0..n {
            jac[n][k] = Complex64::new(self.weight[k], 0.0);
        }
        (r, jac)
    }

    fn normalized_residual(&self, zeta: &[Complex64], g: &[Complex64]) -> f64 {
        let scale: f64 = self
            .monomials(zeta)
            .iter()
            .zip(self.exps)
            .map(|(t, e)| t.norm() * e.iter().map(|x| x * x).sum::<f64>().sqrt())
            .sum();
        norm_sqr(g).sqrt() / scale
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Solves `(JᴴJ + λ·(diag(JᴴJ) + I)) δ = −Jᴴr`.
fn lm_step(jac: &[Vec<Complex64>], r: &[Complex64], lambda: f64) -> Option<Vec<Complex64>> {
    let n = jac[0].len();
    let mut a = vec![vec![Complex64::zero(); n + 1]; n];
    for i in 0..n {
        for k in 0..n {
            a[i][k] = jac.iter().map(|row| row[i].conj() * row[k]).sum();
        }
        a[i][n] = -jac.iter().zip(r).map(|(row, v)| row[i].conj() * v).sum::<Complex64>();
    }
    for (i, row) in a.iter_mut().enumerate() {
        let d = row[i].re;
        row[i] += lambda * (d + 1.0);
    }
    solve_complex(a)
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_complex(mut a: Vec<Vec<Complex64>>) -> Option<Vec<Complex64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))?;
        if a[pivot][col].norm() == 0.0 || !a[pivot][col].norm().is_finite() {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..=n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
        }
    }
    let mut x = vec![Complex64::zero(); n];
    for row in (0..n).rev() {
        let s: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][n] - s) / a[row][row];
    }
    x.iter().all(|v| v.re.is_finite() && v.im.is_finite()).then_some(x)
}
