//! Newton polyhedra `Γ(f) = conv(⋃ (γ + ℝⁿ₊))` in exact rational arithmetic.
//!
//! A polyhedron is stored as its vertices and its facet inequalities
//! `⟨w, x⟩ ≥ 1` (every `w ≥ 0`); the coordinate inequalities `x_k ≥ 0` are
//! implicit. Faces are identified by the set of facets they lie on, which
//! makes compactness a purely combinatorial question: a face is bounded iff
//! the union of the supports of its facet normals covers every coordinate.

mod diagonal;
mod faces;
mod hull;
mod nondegeneracy;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyparse::{ExponentTuple, SparsePolynomial};
use crate::rational::{dot, int, rank, serde_pq, serde_pq_vec, Rational};

pub use diagonal::{diagonal_intersection, DiagonalData};
pub use faces::{enumerate_compact_faces, enumerate_faces, Face};
pub use hull::dominance_minimal;
pub use nondegeneracy::{is_nondegenerate, nondegeneracy_of, FaceWitness, Nondegeneracy};

/// Largest ambient dimension accepted unless configured otherwise.
pub const DEFAULT_MAX_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NewtonError {
    #[error("dimension {dim} exceeds the supported maximum {cap}")]
    UnsupportedDimension { dim: usize, cap: usize },
    #[error("support set is empty")]
    EmptySupport,
    #[error("support contains the zero exponent (f(0) must vanish)")]
    ZeroExponent,
    #[error("exponent {0:?} does not have the ambient dimension")]
    DimensionMismatch(Vec<u32>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HullMethod {
    /// Monotone chain for n = 2, double description otherwise.
    #[default]
    Auto,
    DoubleDescription,
    MonotoneChain,
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonConfig {
    pub max_dim: usize,
    pub method: HullMethod,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { max_dim: DEFAULT_MAX_DIM, method: HullMethod::Auto }
    }
}

/// `⟨normal, x⟩ ≥ offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    #[serde(with = "serde_pq_vec")]
    pub normal: Vec<Rational>,
    #[serde(with = "serde_pq")]
    pub offset: Rational,
}

impl Inequality {
    pub fn holds(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) >= self.offset
    }

    pub fn is_tight(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) == self.offset
    }

    /// Strictly positive normal, i.e. the facet is bounded.
    pub fn is_compact(&self) -> bool {
        self.normal.iter().all(|w| *w > int(0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolyhedron {
    dim: usize,
    vertices: Vec<Vec<u32>>,
    /// Facets `⟨w, x⟩ ≥ 1`.
    facets: Vec<Inequality>,
    /// Indices `k` for which `x_k ≥ 0` is a facet (some vertex has `v_k = 0`).
    coordinate_facets: Vec<usize>,
}

pub fn exponent_to_rational(e: &[u32]) -> Vec<Rational> {
    e.iter().map(|&v| int(v as i64)).collect()
}

impl NewtonPolyhedron {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> Vec<ExponentTuple> {
        self.vertices.iter().cloned().map(ExponentTuple).collect()
    }

    pub fn facets(&self) -> &[Inequality] {
        &self.facets
    }

    pub fn coordinate_facets(&self) -> &[usize] {
        &self.coordinate_facets
    }

    /// Facets followed by the coordinate facets `x_k ≥ 0` that are genuine.
    pub fn constraints(&self) -> Vec<Inequality> {
        let mut all = self.facets.clone();
        for &k in &self.coordinate_facets {
            let mut normal = vec![int(0); self.dim];
            normal[k] = int(1);
            all.push(Inequality { normal, offset: int(0) });
        }
        all
    }

    /// True iff `x` satisfies every stored inequality (coordinates included).
    pub fn membership(&self, x: &[Rational]) -> bool {
        assert_eq!(x.len(), self.dim);
        x.iter().all(|v| *v >= int(0)) && self.facets.iter().all(|f| f.holds(x))
    }

    pub fn compact_facets(&self) -> impl Iterator<Item = &Inequality> {
        self.facets.iter().filter(|f| f.is_compact())
    }
}

pub fn build_polyhedron(supports: &[ExponentTuple], n: usize) -> Result<NewtonPolyhedron, NewtonError> {
    build_polyhedron_with(supports, n, &NewtonConfig::default())
}

pub fn build_polyhedron_with(
    supports: &[ExponentTuple],
    n: usize,
    config: &NewtonConfig,
) -> Result<NewtonPolyhedron, NewtonError> {
    if n > config.max_dim {
        return Err(NewtonError::UnsupportedDimension { dim: n, cap: config.max_dim });
    }
    if supports.is_empty() {
        return Err(NewtonError::EmptySupport);
    }
    for s in supports {
        if s.dim() != n {
            return Err(NewtonError::DimensionMismatch(s.0.clone()));
        }
        if s.is_zero() {
            return Err(NewtonError::ZeroExponent);
        }
    }
    let minimal = dominance_minimal(supports);
    let use_chain = match config.method {
        HullMethod::Auto => n == 2,
        HullMethod::MonotoneChain => {
            assert_eq!(n, 2, "monotone chain is the n = 2 path");
            true
        }
        HullMethod::DoubleDescription => false,
    };
    let normals = if use_chain {
        hull::facets_monotone_chain(&minimal)
    } else {
        hull::facets_double_description(&minimal, n)
    };
    let facets: Vec<Inequality> = normals
        .into_iter()
        .map(|normal| Inequality { normal, offset: int(1) })
        .collect();

    // a minimal point is a vertex iff its tight constraints have rank n
    let vertices: Vec<Vec<u32>> = minimal
        .iter()
        .filter(|v| {
            let x = exponent_to_rational(&v.0);
            let mut tight: Vec<Vec<Rational>> = facets
                .iter()
                .filter(|f| f.is_tight(&x))
                .map(|f| f.normal.clone())
                .collect();
            for (k, &vk) in v.0.iter().enumerate() {
                if vk == 0 {
                    let mut e = vec![int(0); n];
                    e[k] = int(1);
                    tight.push(e);
                }
            }
            rank(&tight) == n
        })
        .map(|v| v.0.clone())
        .collect();
    let coordinate_facets = (0..n)
        .filter(|&k| vertices.iter().any(|v| v[k] == 0))
        .collect();
    Ok(NewtonPolyhedron { dim: n, vertices, facets, coordinate_facets })
}

/// Newton polyhedron of a polynomial with `f(0) = 0`.
pub fn polyhedron_of(f: &SparsePolynomial) -> Result<NewtonPolyhedron, NewtonError> {
    build_polyhedron(&f.support(), f.dim())
}
