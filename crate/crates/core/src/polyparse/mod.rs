//! Sparse polynomials over ℂⁿ: the expression front end, evaluation,
//! boundary-point recentering and the planar real-series data used in
//! `--real` mode.

mod parser;
mod series;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::scalar::Scalar;

pub use parser::{parse_expression, parse_point, parse_poly, ParseError, Variables};
pub use series::{RealSeries, SeriesError};

/// Multi-index `(γ₁,…,γₙ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentTuple(pub Vec<u32>);

impl ExponentTuple {
    pub fn zero(n: usize) -> Self {
        ExponentTuple(vec![0; n])
    }

    pub fn unit(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        ExponentTuple(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn divides(&self, other: &ExponentTuple) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &ExponentTuple) -> ExponentTuple {
        ExponentTuple(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Graded lexicographic order (total degree first, then lex).
    pub fn grlex_cmp(&self, other: &ExponentTuple) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(z)
            .fold(Complex64::new(1.0, 0.0), |acc, (&e, &zk)| acc * zk.powu(e))
    }
}

impl From<Vec<u32>> for ExponentTuple {
    fn from(v: Vec<u32>) -> Self {
        ExponentTuple(v)
    }
}

/// Finitely many monomials, exponent tuple ↦ nonzero coefficient.
///
/// Canonical: zero coefficients are never stored, and once any coefficient
/// is a float every coefficient is (so equal polynomials compare equal).
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePolynomial {
    dim: usize,
    terms: BTreeMap<ExponentTuple, Scalar>,
}

impl SparsePolynomial {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        Self::from_terms(dim, [(ExponentTuple::zero(dim), c)])
    }

    /// The coordinate function `z_{k+1}` (zero-based `k`).
    pub fn variable(dim: usize, k: usize) -> Self {
        Self::from_terms(dim, [(ExponentTuple::unit(dim, k), Scalar::one())])
    }

    pub fn monomial(exponent: ExponentTuple, c: Scalar) -> Self {
        let dim = exponent.dim();
        Self::from_terms(dim, [(exponent, c)])
    }

    /// Like terms are summed.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (ExponentTuple, Scalar)>) -> Self {
        let mut map: BTreeMap<ExponentTuple, Scalar> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.dim(), dim, "exponent length must equal the dimension");
            match map.get_mut(&e) {
                Some(existing) => *existing = &*existing + &c,
                None => {
                    map.insert(e, c);
                }
            }
        }
        let mut p = Self { dim, terms: map };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        if self.terms.values().any(|c| !c.is_exact()) {
            for c in self.terms.values_mut() {
                if c.is_exact() {
                    *c = Scalar::Float(c.to_complex());
                }
            }
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient is a Gaussian rational.
    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentTuple, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &ExponentTuple) -> Option<&Scalar> {
        self.terms.get(e)
    }

    pub fn support(&self) -> Vec<ExponentTuple> {
        self.terms.keys().cloned().collect()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&ExponentTuple::zero(self.dim))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// `f(0) = 0`.
    pub fn vanishes_at_origin(&self) -> bool {
        !self.terms.contains_key(&ExponentTuple::zero(self.dim))
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 if !self.vanishes_at_origin() => Some(self.constant_term()),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_terms(
            self.dim,
            self.terms.iter().chain(other.terms.iter()).map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(e, a)| (e.clone(), a * c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.push((ea.add(eb), ca * cb));
            }
        }
        Self::from_terms(self.dim, out)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(self.dim, Scalar::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Term-sum evaluation in floating point.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.dim, "point dimension must equal polynomial dimension");
        self.terms
            .iter()
            .map(|(e, c)| c.to_complex() * e.eval(z))
            .sum()
    }

    /// Evaluation in coefficient arithmetic (exact for exact inputs).
    pub fn eval_scalar(&self, z: &[Scalar]) -> Scalar {
        assert_eq!(z.len(), self.dim);
        self.terms.iter().fold(Scalar::zero(), |acc, (e, c)| {
            let m = e
                .0
                .iter()
                .zip(z)
                .fold(c.clone(), |m, (&k, zk)| &m * &zk.pow(k));
            &acc + &m
        })
    }

    /// `f(z0 + z′) − f(z0)` as a polynomial in `z′`.
    pub fn recentered(&self, z0: &[Scalar]) -> Self {
        assert_eq!(z0.len(), self.dim);
        // (z0_k + z_k)^j, memoized per variable
        let mut powers: Vec<Vec<SparsePolynomial>> = (0..self.dim)
            .map(|k| {
                vec![
                    Self::constant(self.dim, Scalar::one()),
                    Self::constant(self.dim, z0[k].clone()).add(&Self::variable(self.dim, k)),
                ]
            })
            .collect();
        let mut acc = Self::zero(self.dim);
        for (e, c) in &self.terms {
            let mut term = Self::constant(self.dim, c.clone());
            for (k, &ek) in e.0.iter().enumerate() {
                while powers[k].len() <= ek as usize {
                    let next = powers[k].last().unwrap().mul(&powers[k][1]);
                    powers[k].push(next);
                }
                term = term.mul(&powers[k][ek as usize]);
            }
            acc = acc.add(&term);
        }
        acc.terms.remove(&ExponentTuple::zero(self.dim));
        acc
    }

    /// Prints with caller-supplied variable names (zero-based index).
    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(usize) -> String) -> impl fmt::Display + 'a {
        Printer { poly: self, names }
    }
}

/// Componentwise recentering of a map `F = (f₁,…,f_m)` at `z0`; each output
/// component vanishes at the origin.
pub fn recenter(map: &[SparsePolynomial], z0: &[Scalar]) -> Vec<SparsePolynomial> {
    map.iter().map(|f| f.recentered(z0)).collect()
}

/// `|F(z)|² = Σ|f_k(z)|²`.
pub fn map_norm_sqr(map: &[SparsePolynomial], z: &[Complex64]) -> f64 {
    map.iter().map(|f| f.eval(z).norm_sqr()).sum()
}

struct Printer<'a> {
    poly: &'a SparsePolynomial,
    names: &'a dyn Fn(usize) -> String,
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| b.0.grlex_cmp(a.0));
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    let name = (self.names)(v);
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            let mono = mono.join("*");
            let coeff = c.to_string();
            let (negative, magnitude) = match coeff.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, coeff),
            };
            let body = match (mono.is_empty(), magnitude.as_str()) {
                (true, _) => magnitude.clone(),
                (false, "1") => mono.clone(),
                (false, m) => format!("{m}*{mono}"),
            };
            match (idx, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for SparsePolynomial {
    /// Canonical form: `z1^4 + z2^4 + z1^2*z2 + z1*z2^2` (graded-lex, descending).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: usize| format!("z{}", v + 1);
        let printer = Printer { poly: self, names: &names };
        write!(f, "{printer}")
    }
}
