use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{exponent_to_rational, Inequality, NewtonPolyhedron};
use crate::rational::{dot, rank, serde_pq, serde_pq_vec, Rational};

/// A nonempty proper face of `Γ(f)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    /// Supporting normal; the face is `⟨normal, x⟩ = offset`. Strictly
    /// positive iff the face is compact.
    #[serde(with = "serde_pq_vec")]
    pub normal: Vec<Rational>,
    /// 1, or 0 for faces lying only on coordinate hyperplanes.
    #[serde(with = "serde_pq")]
    pub offset: Rational,
    /// Vertices on the face (exponent tuples).
    pub vertices: Vec<Vec<u32>>,
    pub dim: usize,
    pub compact: bool,
    /// Indices into [`NewtonPolyhedron::constraints`] of the facets containing the face.
    #[serde(skip)]
    pub(crate) tight: Vec<usize>,
}

impl Face {
    pub fn contains(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) == self.offset
    }
}

struct Lattice<'a> {
    constraints: &'a [Inequality],
    vertices: Vec<Vec<Rational>>,
    vertex_tight: Vec<Vec<bool>>,
    n: usize,
}

impl Lattice<'_> {
    /// Closes a set of constraints to the full set of facets containing the
    /// face it cuts out; `None` for the empty face.
    fn closure(&self, set: &BTreeSet<usize>) -> Option<(BTreeSet<usize>, Vec<usize>)> {
        let verts: Vec<usize> = (0..self.vertices.len())
            .filter(|&v| set.iter().all(|&c| self.vertex_tight[v][c]))
            .collect();
        if verts.is_empty() {
            return None;
        }
        // recession directions e_k of the face: k outside every normal's support
        let free: Vec<usize> = (0..self.n)
            .filter(|&k| set.iter().all(|&c| self.constraints[c].normal[k].is_zero()))
            .collect();
        let closed = (0..self.constraints.len())
            .filter(|&c| {
                verts.iter().all(|&v| self.vertex_tight[v][c])
                    && free.iter().all(|&k| self.constraints[c].normal[k].is_zero())
            })
            .collect();
        Some((closed, verts))
    }
}

/// All nonempty proper faces, compact or not, in a deterministic order.
pub fn enumerate_faces(poly: &NewtonPolyhedron) -> Vec<Face> {
    let constraints = poly.constraints();
    let vertices: Vec<Vec<Rational>> = poly
        .vertices()
        .iter()
        .map(|v| exponent_to_rational(&v.0))
        .collect();
    let vertex_tight = vertices
        .iter()
        .map(|v| constraints.iter().map(|c| c.is_tight(v)).collect())
        .collect();
    let lattice = Lattice { constraints: &constraints, vertices, vertex_tight, n: poly.dim() };

    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut found: Vec<(BTreeSet<usize>, Vec<usize>)> = Vec::new();
    let mut queue: VecDeque<BTreeSet<usize>> = VecDeque::new();
    for c in 0..constraints.len() {
        queue.push_back(BTreeSet::from([c]));
    }
    while let Some(set) = queue.pop_front() {
        let Some((closed, verts)) = lattice.closure(&set) else {
            continue;
        };
        if !seen.insert(closed.clone()) {
            continue;
        }
        // every face is an intersection of facets: meet with all known faces
        for (other, _) in &found {
            let meet: BTreeSet<usize> = closed.union(other).copied().collect();
            if !seen.contains(&meet) {
                queue.push_back(meet);
            }
        }
        found.push((closed, verts));
    }

    let all_vertices = poly.vertices();
    let mut faces: Vec<Face> = found
        .into_iter()
        .map(|(tight, verts)| {
            let normals: Vec<Vec<Rational>> =
                tight.iter().map(|&c| constraints[c].normal.clone()).collect();
            let dim = poly.dim() - rank(&normals);
            let mut normal = vec![Rational::zero(); poly.dim()];
            let mut offset = Rational::zero();
            for &c in &tight {
                for (acc, w) in normal.iter_mut().zip(&constraints[c].normal) {
                    *acc += w;
                }
                offset += &constraints[c].offset;
            }
            if !offset.is_zero() {
                for w in normal.iter_mut() {
                    *w = &*w / &offset;
                }
                offset = Rational::one();
            }
            let compact = normal.iter().all(|w| !w.is_zero());
            Face {
                normal,
                offset,
                vertices: verts.iter().map(|&v| all_vertices[v].0.clone()).collect(),
                dim,
                compact,
                tight: tight.into_iter().collect(),
            }
        })
        .collect();
    faces.sort_by(|a, b| (a.dim, &a.vertices, &a.normal).cmp(&(b.dim, &b.vertices, &b.normal)));
    faces
}

/// Compact faces of every dimension, vertices included.
pub fn enumerate_compact_faces(poly: &NewtonPolyhedron) -> Vec<Face> {
    enumerate_faces(poly).into_iter().filter(|f| f.compact).collect()
}
