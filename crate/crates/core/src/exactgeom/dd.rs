//! Double description: extreme rays of a pointed polyhedral cone given by
//! inequality rows, over exact integers.
//!
//! Both directions of the vertex/facet dictionary reduce to this routine:
//! vertex enumeration homogenizes the halfspace system, facet enumeration
//! runs it on the dual cone of the lifted point set.
// Index-based loops mirror the matrix algebra; clearer than iterator chains here.
#![allow(clippy::needless_range_loop)]
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg;
use super::rational::{primitive_part, Rational};
use crate::error::{Error, Result};

/// Zero-set bitmask over constraint rows.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ZeroSet {
    words: Vec<u64>,
}

impl ZeroSet {
    fn new(len: usize) -> Self {
        ZeroSet {
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn insert(&mut self, index: usize) {
        self.words[index / 64] |= 1 << (index % 64);
    }

    fn intersection(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn is_subset_of(&self, other: &ZeroSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[derive(Clone, Debug)]
struct Ray {
    vector: Vec<BigInt>,
    zero: ZeroSet,
}

fn dot(row: &[BigInt], vector: &[BigInt]) -> BigInt {
    row.iter().zip(vector).map(|(a, b)| a * b).sum()
}

/// Extreme rays of `{x in R^dim : <row, x> >= 0 for all rows}` for a pointed
/// cone. Rays come back as primitive integer vectors in lexicographic order.
///
/// Errors with `NotPointed` when the rows do not have full rank, in which
/// case the cone contains a line and has no extreme-ray description.
pub fn extreme_rays(dim: usize, rows: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    for row in rows {
        assert_eq!(row.len(), dim, "constraint row has wrong dimension");
    }
    let rational_rows = |idx: &[usize]| -> Vec<Vec<Rational>> {
        idx.iter()
            .map(|&i| {
                rows[i]
                    .iter()
                    .map(|v| Rational::from_integer(v.clone()))
                    .collect()
            })
            .collect()
    };

    // Greedily pick `dim` rows of full rank for the initial simplicial cone.
    let mut basis_idx: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        if basis_idx.len() == dim {
            break;
        }
        let mut candidate = basis_idx.clone();
        candidate.push(i);
        if linalg::rank(&rational_rows(&candidate)) == candidate.len() {
            basis_idx.push(i);
        }
    }
    if basis_idx.len() < dim {
        return Err(Error::NotPointed);
    }

    // Initial rays: scaled columns of the inverse of the basis matrix, signed
    // so that every basis row evaluates nonnegatively.
    let basis = rational_rows(&basis_idx);
    let inv = linalg::invert(&basis).expect("full-rank basis must be invertible");
    let total = rows.len();
    let mut rays: Vec<Ray> = Vec::new();
    for j in 0..dim {
        let col: Vec<Rational> = (0..dim).map(|i| inv[i][j].clone()).collect();
        let vector = primitive_part(&super::rational::integerize(&col));
        let mut zero = ZeroSet::new(total);
        for (slot, &ri) in basis_idx.iter().enumerate() {
            let value = dot(&rows[ri], &vector);
            if value.is_zero() {
                zero.insert(ri);
            } else {
                debug_assert_eq!(slot, j, "initial ray must vanish off its own row");
                debug_assert!(value.is_positive());
            }
        }
        rays.push(Ray { vector, zero });
    }

    let mut processed: Vec<usize> = basis_idx.clone();
    for cur in 0..total {
        if basis_idx.contains(&cur) {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| dot(&rows[cur], &r.vector)).collect();
        let has_negative = values.iter().any(|v| v.is_negative());
        if !has_negative {
            for (ray, value) in rays.iter_mut().zip(&values) {
                if value.is_zero() {
                    ray.zero.insert(cur);
                }
            }
            processed.push(cur);
            continue;
        }

        let mut next: Vec<Ray> = Vec::new();
        for (ray, value) in rays.iter().zip(&values) {
            if !value.is_negative() {
                let mut kept = ray.clone();
                if value.is_zero() {
                    kept.zero.insert(cur);
                }
                next.push(kept);
            }
        }

        // Combine adjacent (positive, negative) pairs into new boundary rays.
        for (i, vi) in values.iter().enumerate() {
            if !vi.is_positive() {
                continue;
            }
            for (j, vj) in values.iter().enumerate() {
                if !vj.is_negative() {
                    continue;
                }
                if !adjacent(&rays, i, j, dim) {
                    continue;
                }
                let pos = &rays[i];
                let neg = &rays[j];
                // vi * neg - vj * pos lands on the new hyperplane.
                let combo: Vec<BigInt> = pos
                    .vector
                    .iter()
                    .zip(&neg.vector)
                    .map(|(p, n)| vi * n - vj * p)
                    .collect();
                let vector = primitive_part(&combo);
                debug_assert!(!vector.iter().all(|v| v.is_zero()));
                let mut zero = ZeroSet::new(total);
                for &p in &processed {
                    if dot(&rows[p], &vector).is_zero() {
                        zero.insert(p);
                    }
                }
                zero.insert(cur);
                next.push(Ray { vector, zero });
            }
        }
        rays = next;
        processed.push(cur);
    }

    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.vector).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Combinatorial adjacency: two extreme rays are adjacent when no third ray's
/// zero set contains the intersection of theirs.
fn adjacent(rays: &[Ray], i: usize, j: usize, dim: usize) -> bool {
    let common = rays[i].zero.intersection(&rays[j].zero);
    if dim >= 2 && common.count() + 2 < dim {
        return false;
    }
    for (k, ray) in rays.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        if common.is_subset_of(&ray.zero) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ivec(vals: &[i64]) -> Vec<BigInt> {
        vals.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn octant_rays() {
        let rows = vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1])];
        let rays = extreme_rays(3, &rows).unwrap();
        assert_eq!(
            rays,
            vec![ivec(&[0, 0, 1]), ivec(&[0, 1, 0]), ivec(&[1, 0, 0])]
        );
    }

    #[test]
    fn square_cone_has_four_rays() {
        // Homogenization of the unit square: {(x, y, t): 0 <= x <= t, 0 <= y <= t}.
        let rows = vec![
            ivec(&[1, 0, 0]),
            ivec(&[0, 1, 0]),
            ivec(&[-1, 0, 1]),
            ivec(&[0, -1, 1]),
            ivec(&[0, 0, 1]),
        ];
        let rays = extreme_rays(3, &rows).unwrap();
        assert_eq!(
            rays,
            vec![
                ivec(&[0, 0, 1]),
                ivec(&[0, 1, 1]),
                ivec(&[1, 0, 1]),
                ivec(&[1, 1, 1]),
            ]
        );
    }

    #[test]
    fn redundant_constraint_is_ignored() {
        let rows = vec![
            ivec(&[1, 0]),
            ivec(&[0, 1]),
            ivec(&[1, 1]), // redundant over the first two
        ];
        let rays = extreme_rays(2, &rows).unwrap();
        assert_eq!(rays, vec![ivec(&[0, 1]), ivec(&[1, 0])]);
    }

    #[test]
    fn lineality_is_reported() {
        let rows = vec![ivec(&[1, 0])];
        assert!(matches!(
            extreme_rays(2, &rows),
            Err(Error::NotPointed)
        ));
    }

    #[test]
    fn trivial_cone_has_no_rays() {
        // x >= 0 and x <= 0 and y >= 0 and y <= 0: the origin only.
        let rows = vec![ivec(&[1, 0]), ivec(&[-1, 0]), ivec(&[0, 1]), ivec(&[0, -1])];
        let rays = extreme_rays(2, &rows).unwrap();
        assert!(rays.is_empty());
    }
}
