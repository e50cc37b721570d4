use serde::{Deserialize, Serialize};

use super::faces::enumerate_faces;
use super::NewtonPolyhedron;
use crate::rational::{dot, int, rank, serde_pq, serde_pq_vec, Rational};

/// Where the weighted diagonal `t·((1+τ) at axis j, 1 elsewhere)` meets `∂Γ(f)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalData {
    pub tau: u32,
    /// Zero-based distinguished coordinate.
    pub axis: usize,
    #[serde(with = "serde_pq")]
    pub d: Rational,
    #[serde(with = "serde_pq_vec")]
    pub q: Vec<Rational>,
    /// Number of compact faces (all dimensions) containing `Q_τ`.
    pub compact_face_count: usize,
    /// `n − dim` of the smallest face containing `Q_τ`.
    pub minimal_face_codim: usize,
}

pub fn weight_vector(n: usize, tau: u32, axis: usize) -> Vec<Rational> {
    let mut u = vec![int(1); n];
    u[axis] = int(1 + tau as i64);
    u
}

pub fn diagonal_intersection(poly: &NewtonPolyhedron, tau: u32, axis: usize) -> DiagonalData {
    let n = poly.dim();
    assert!(axis < n, "axis out of range");
    let u = weight_vector(n, tau, axis);
    // ⟨w, t·u⟩ ≥ 1  ⇔  t ≥ 1/⟨w, u⟩; the binding facet gives the largest bound
    let d = poly
        .facets()
        .iter()
        .map(|f| dot(&f.normal, &u).recip())
        .max()
        .expect("a Newton polyhedron has at least one facet off the origin");
    let q: Vec<Rational> = u.iter().map(|c| c * &d).collect();

    let constraints = poly.constraints();
    let tight_at_q: Vec<usize> = (0..constraints.len())
        .filter(|&c| constraints[c].is_tight(&q))
        .collect();
    let normals: Vec<Vec<Rational>> = tight_at_q
        .iter()
        .map(|&c| constraints[c].normal.clone())
        .collect();
    let minimal_face_codim = rank(&normals);
    let compact_face_count = enumerate_faces(poly)
        .iter()
        .filter(|f| f.compact && f.tight.iter().all(|c| tight_at_q.contains(c)))
        .count();
    DiagonalData {
        tau,
        axis,
        d,
        q,
        compact_face_count,
        minimal_face_codim,
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_polyhedron;
    use super::*;
    use crate::polyparse::ExponentTuple;
    use crate::rational::rat;

    fn poly(v: &[&[u32]]) -> NewtonPolyhedron {
        let pts: Vec<ExponentTuple> = v.iter().map(|p| ExponentTuple(p.to_vec())).collect();
        build_polyhedron(&pts, v[0].len()).unwrap()
    }

    fn example() -> NewtonPolyhedron {
        poly(&[&[4, 0], &[2, 1], &[1, 2], &[0, 4]])
    }

    #[test]
    fn example_tau0() {
        let d = diagonal_intersection(&example(), 0, 0);
        assert_eq!(d.d, rat(3, 2));
        assert_eq!(d.q, vec![rat(3, 2), rat(3, 2)]);
        assert_eq!((d.compact_face_count, d.minimal_face_codim), (1, 1));
    }

    #[test]
    fn example_tau1_hits_vertex() {
        let d = diagonal_intersection(&example(), 1, 0);
        assert_eq!(d.d, int(1));
        assert_eq!(d.q, vec![int(2), int(1)]);
        assert_eq!((d.compact_face_count, d.minimal_face_codim), (3, 2));
    }

    #[test]
    fn example_tau2() {
        let d = diagonal_intersection(&example(), 2, 0);
        assert_eq!(d.d, rat(4, 5));
        assert_eq!(d.q, vec![rat(12, 5), rat(4, 5)]);
        assert_eq!((d.compact_face_count, d.minimal_face_codim), (1, 1));
    }

    #[test]
    fn second_axis_by_symmetry() {
        let d = diagonal_intersection(&example(), 1, 1);
        assert_eq!(d.d, int(1));
        assert_eq!(d.q, vec![int(1), int(2)]);
    }

    #[test]
    fn one_dimensional() {
        let d = diagonal_intersection(&poly(&[&[2]]), 0, 0);
        assert_eq!(d.d, int(2));
        assert_eq!((d.compact_face_count, d.minimal_face_codim), (1, 1));
    }

    #[test]
    fn planar_series_distance() {
        let d = diagonal_intersection(&poly(&[&[8, 0], &[4, 2], &[2, 6], &[0, 10]]), 0, 0);
        assert_eq!(d.d, rat(10, 3));
    }

    #[test]
    fn monomial_conventions_disagree() {
        let d = diagonal_intersection(&poly(&[&[2, 2]]), 0, 0);
        assert_eq!(d.d, int(2));
        assert_eq!((d.compact_face_count, d.minimal_face_codim), (1, 2));
    }
}
