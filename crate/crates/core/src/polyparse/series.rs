use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::parser::{parse_expression, ParseError, Variables};
use super::ExponentTuple;
use crate::rational::{int, to_f64, Rational};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("real series needs at least one term")]
    Empty,
    #[error("coefficient of x^{0}y^{1} must be a non-negative real number")]
    BadCoefficient(u32, u32),
    #[error("exponents of x^{0}y^{1} must be even")]
    OddExponent(u32, u32),
}

/// `ρ(x, y) = Σ c_γ x^{2γ₁} y^{2γ₂}` on ℂ ≅ ℝ², with every `c_γ ≥ 0`.
///
/// Keys are the halved exponents `(γ₁, γ₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSeries {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl RealSeries {
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32), Rational)>) -> Result<Self, SeriesError> {
        let mut map = BTreeMap::new();
        for ((a, b), c) in terms {
            if c.is_negative() {
                return Err(SeriesError::BadCoefficient(2 * a, 2 * b));
            }
            if !c.is_zero() {
                *map.entry((a, b)).or_insert_with(Rational::zero) += c;
            }
        }
        if map.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Self { terms: map })
    }

    /// Unit coefficients on the given halved exponents.
    pub fn from_halved(exponents: &[(u32, u32)]) -> Result<Self, SeriesError> {
        Self::new(exponents.iter().map(|&e| (e, int(1))))
    }

    /// Parses e.g. `x^8 + x^4 y^2 + x^2 y^6 + y^10`.
    pub fn parse(text: &str) -> Result<Self, SeriesError> {
        let poly = parse_expression(text, Variables::Named(&["x", "y"]))?;
        let mut terms = Vec::new();
        for (e, c) in poly.terms() {
            let (px, py) = (e.0[0], e.0[1]);
            if px % 2 == 1 || py % 2 == 1 {
                return Err(SeriesError::OddExponent(px, py));
            }
            let coefficient = match c {
                Scalar::Exact(g) if g.im.is_zero() && !g.re.is_negative() => g.re.clone(),
                _ => return Err(SeriesError::BadCoefficient(px, py)),
            };
            terms.push(((px / 2, py / 2), coefficient));
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    /// `δ = min |γ|` over stored terms.
    pub fn delta(&self) -> Rational {
        let d = self.terms.keys().map(|(a, b)| a + b).min().expect("non-empty");
        int(d as i64)
    }

    /// Kernel exponent `−2 − 1/δ` of `K_{Ω_ρ}((0,w))` in `Im w`.
    pub fn kernel_exponent(&self) -> Rational {
        int(-2) - self.delta().recip()
    }

    /// Exponents `(2γ₁, 2γ₂)` of the real Newton polyhedron.
    pub fn real_supports(&self) -> Vec<ExponentTuple> {
        self.terms
            .keys()
            .map(|&(a, b)| ExponentTuple(vec![2 * a, 2 * b]))
            .collect()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (x2, y2) = (x * x, y * y);
        self.terms
            .iter()
            .map(|(&(a, b), c)| to_f64(c) * x2.powi(a as i32) * y2.powi(b as i32))
            .sum()
    }
}

impl fmt::Display for RealSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&(a, b), c)| {
                let mut factors = Vec::new();
                if !c.is_integer() || *c != int(1) {
                    factors.push(if c.is_integer() {
                        c.numer().to_string()
                    } else {
                        format!("{}/{}", c.numer(), c.denom())
                    });
                }
                for (name, e) in [("x", 2 * a), ("y", 2 * b)] {
                    match e {
                        0 => {}
                        1 => factors.push(name.to_string()),
                        e => factors.push(format!("{name}^{e}")),
                    }
                }
                if factors.is_empty() {
                    "1".to_string()
                } else {
                    factors.join("*")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
