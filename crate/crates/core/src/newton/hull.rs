//! Facets of `conv(P) + ℝⁿ₊` in exact arithmetic.
//!
//! The valid inequalities `⟨w, x⟩ ≥ b` of the polyhedron form the cone
//! `{(y₀, w) : y₀ + ⟨w, v⟩ ≥ 0 ∀v ∈ P, w ≥ 0}` (with `y₀ = −b`). Its extreme
//! rays with `y₀ < 0` are the facets that do not pass through the origin;
//! they are found with the double-description method over integer rays.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::ExponentTuple;
use crate::rational::{primitive, Rational};

/// Points not componentwise ≥ another point, deduplicated and sorted.
pub fn dominance_minimal(points: &[ExponentTuple]) -> Vec<ExponentTuple> {
    let mut pts: Vec<ExponentTuple> = points.to_vec();
    pts.sort();
    pts.dedup();
    let minimal: Vec<ExponentTuple> = pts
        .iter()
        .filter(|p| !pts.iter().any(|q| q != *p && q.divides(p)))
        .cloned()
        .collect();
    minimal
}

#[derive(Clone)]
struct Ray {
    coords: Vec<BigInt>,
    zeros: Vec<bool>,
}

fn eval_row(row: &[BigInt], ray: &[BigInt]) -> BigInt {
    row.iter().zip(ray).map(|(a, b)| a * b).sum()
}

/// Normals `w` (each `w ≥ 0`) of the facets `⟨w, x⟩ ≥ 1`, by double description.
pub fn facets_double_description(minimal: &[ExponentTuple], n: usize) -> Vec<Vec<Rational>> {
    assert!(!minimal.is_empty());
    let d = n + 1;
    // constraint rows; the n coordinate rows come first
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + minimal.len());
    for k in 0..n {
        let mut row = vec![BigInt::zero(); d];
        row[k + 1] = BigInt::from(1);
        rows.push(row);
    }
    for v in minimal {
        let mut row = Vec::with_capacity(d);
        row.push(BigInt::from(1));
        row.extend(v.0.iter().map(|&e| BigInt::from(e)));
        rows.push(row);
    }
    let total = rows.len();

    // the cone cut out by the coordinate rows and the first point is simplicial:
    // (1, 0) and (−v₀ₖ, eₖ)
    let v0 = &minimal[0];
    let mut rays: Vec<Ray> = Vec::new();
    let mut first = vec![BigInt::zero(); d];
    first[0] = BigInt::from(1);
    rays.push(Ray { coords: first, zeros: vec![false; total] });
    for k in 0..n {
        let mut c = vec![BigInt::zero(); d];
        c[0] = -BigInt::from(v0.0[k]);
        c[k + 1] = BigInt::from(1);
        rays.push(Ray { coords: c, zeros: vec![false; total] });
    }
    for ray in &mut rays {
        for i in 0..=n {
            ray.zeros[i] = eval_row(&rows[i], &ray.coords).is_zero();
        }
    }

    for (i, row) in rows.iter().enumerate().skip(n + 1) {
        let values: Vec<BigInt> = rays.iter().map(|r| eval_row(row, &r.coords)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&r| values[r].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&r| values[r].is_negative()).collect();
        if minus.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                r.zeros[i] = v.is_zero();
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for &p in &plus {
            for &m in &minus {
                if !adjacent(&rays, p, m, i, d) {
                    continue;
                }
                let mut coords: Vec<BigInt> = rays[m]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(rm, rp)| &values[p] * rm - &values[m] * rp)
                    .collect();
                primitive(&mut coords);
                let mut zeros: Vec<bool> = rays[p]
                    .zeros
                    .iter()
                    .zip(&rays[m].zeros)
                    .map(|(a, b)| *a && *b)
                    .collect();
                zeros[i] = true;
                next.push(Ray { coords, zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (idx, mut ray) in rays.into_iter().enumerate() {
            if values[idx].is_negative() {
                continue;
            }
            ray.zeros[i] = values[idx].is_zero();
            kept.push(ray);
        }
        kept.extend(next);
        rays = kept;
    }

    let mut normals: Vec<Vec<Rational>> = rays
        .iter()
        .filter(|r| r.coords[0].is_negative())
        .map(|r| {
            let b = -r.coords[0].clone();
            r.coords[1..]
                .iter()
                .map(|w| Rational::new(w.clone(), b.clone()))
                .collect()
        })
        .collect();
    normals.sort();
    normals.dedup();
    normals
}

/// Combinatorial adjacency test over the rows processed so far (`0..upto`).
fn adjacent(rays: &[Ray], a: usize, b: usize, upto: usize, d: usize) -> bool {
    let common: Vec<usize> = (0..upto)
        .filter(|&k| rays[a].zeros[k] && rays[b].zeros[k])
        .collect();
    if common.len() + 2 < d {
        return false;
    }
    !rays.iter().enumerate().any(|(t, ray)| {
        t != a && t != b && common.iter().all(|&k| ray.zeros[k])
    })
}

/// n = 2 fast path: lower-left convex chain through the minimal points.
pub fn facets_monotone_chain(minimal: &[ExponentTuple]) -> Vec<Vec<Rational>> {
    let mut pts: Vec<(i64, i64)> = minimal
        .iter()
        .map(|p| (p.0[0] as i64, p.0[1] as i64))
        .collect();
    // minimal points have distinct x with y strictly decreasing in x
    pts.sort();
    let mut chain: Vec<(i64, i64)> = Vec::new();
    for p in pts {
        while chain.len() >= 2 {
            let (a, b) = (chain[chain.len() - 2], chain[chain.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - b.1) - (b.1 - a.1) * (p.0 - b.0);
            if cross <= 0 {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(p);
    }
    let ratio = |num: i64, den: i64| Rational::new(BigInt::from(num), BigInt::from(den));
    let mut normals = Vec::new();
    let first = chain[0];
    if first.0 > 0 {
        normals.push(vec![ratio(1, first.0), Rational::zero()]);
    }
    let last = *chain.last().unwrap();
    if last.1 > 0 {
        normals.push(vec![Rational::zero(), ratio(1, last.1)]);
    }
    for pair in chain.windows(2) {
        let (p, q) = (pair[0], pair[1]);
        let w = (p.1 - q.1, q.0 - p.0);
        let b = w.0 * p.0 + w.1 * p.1;
        normals.push(vec![ratio(w.0, b), ratio(w.1, b)]);
    }
    normals.sort();
    normals
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pts(v: &[&[u32]]) -> Vec<ExponentTuple> {
        v.iter().map(|p| ExponentTuple(p.to_vec())).collect()
    }

    #[test]
    fn dominated_points_removed() {
        let m = dominance_minimal(&pts(&[&[2, 2], &[1, 3], &[2, 3], &[3, 2], &[2, 2]]));
        assert_eq!(m, pts(&[&[1, 3], &[2, 2]]));
    }

    #[test]
    fn both_routes_agree_on_example() {
        let m = dominance_minimal(&pts(&[&[4, 0], &[2, 1], &[1, 2], &[0, 4]]));
        let dd = facets_double_description(&m, 2);
        let mc = facets_monotone_chain(&m);
        assert_eq!(dd, mc);
        assert!(dd.contains(&vec![rat(1, 4), rat(1, 2)]));
        assert!(dd.contains(&vec![rat(1, 3), rat(1, 3)]));
        assert!(dd.contains(&vec![rat(1, 2), rat(1, 4)]));
        assert_eq!(dd.len(), 3);
    }

    #[test]
    fn single_orthant() {
        let m = pts(&[&[1, 0]]);
        assert_eq!(facets_double_description(&m, 2), vec![vec![rat(1, 1), rat(0, 1)]]);
        assert_eq!(facets_monotone_chain(&m), vec![vec![rat(1, 1), rat(0, 1)]]);
    }

    #[test]
    fn three_dimensional_simplex() {
        let m = pts(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 6]]);
        assert_eq!(
            facets_double_description(&m, 3),
            vec![vec![rat(1, 2), rat(1, 3), rat(1, 6)]]
        );
    }
}
