//! Dense exact linear algebra over the rationals plus the few integer
//! lattice routines the kernel needs (column reduction, lattice kernels).
// Index-based loops mirror the matrix algebra; clearer than iterator chains here.
#![allow(clippy::needless_range_loop)]
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

/// Row-reduces a copy of `rows` and returns its rank.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..m.len()).find(|&r| !m[r][col].is_zero());
        let Some(pivot) = pivot else { continue };
        m.swap(rank, pivot);
        let inv = m[rank][col].recip();
        for c in col..cols {
            m[rank][c] = &m[rank][c] * &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    m[r][c] = &m[r][c] - &factor * &m[rank][c];
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Solves `A x = b` for one solution (free variables set to zero).
/// Returns `None` when the system is inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), b.len());
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| !m[r][col].is_zero());
        let Some(pivot) = pivot else { continue };
        m.swap(rank, pivot);
        let inv = m[rank][col].recip();
        for c in col..=cols {
            m[rank][c] = &m[rank][c] * &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=cols {
                    m[r][c] = &m[r][c] - &factor * &m[rank][c];
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    for r in rank..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = m[r][cols].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for c in 0..2 * n {
            m[col][c] = &m[col][c] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..2 * n {
                    m[r][c] = &m[r][c] - &factor * &m[col][c];
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Determinant by fraction-free row reduction.
pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(pivot) = pivot else {
            return Rational::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= m[col][col].clone();
        let inv = m[col][col].recip();
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let factor = &m[r][col] * &inv;
                for c in col..n {
                    m[r][c] = &m[r][c] - &factor * &m[col][c];
                }
            }
        }
    }
    det
}

/// Basis of the right kernel `{x : A x = 0}` over the rationals.
pub fn kernel(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| !m[r][col].is_zero());
        let Some(pivot) = pivot else { continue };
        m.swap(rank, pivot);
        let inv = m[rank][col].recip();
        for c in col..cols {
            m[rank][c] = &m[rank][c] * &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    m[r][c] = &m[r][c] - &factor * &m[rank][c];
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (r, &col) in pivot_cols.iter().enumerate() {
            v[col] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Signature `(positive, negative, zero)` of a symmetric rational matrix,
/// computed by congruence diagonalization.
pub fn signature(sym: &[Vec<Rational>]) -> (usize, usize, usize) {
    let n = sym.len();
    let mut m: Vec<Vec<Rational>> = sym.to_vec();
    let mut pos = 0;
    let mut neg = 0;
    let mut zero = 0;
    let mut start = 0;
    while start < n {
        // Find a usable pivot on the diagonal, or synthesize one.
        let diag = (start..n).find(|&i| !m[i][i].is_zero());
        let pivot = match diag {
            Some(i) => i,
            None => {
                let off = (start..n)
                    .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !m[i][j].is_zero());
                match off {
                    None => {
                        zero += n - start;
                        break;
                    }
                    Some((i, j)) => {
                        // Congruence: add row/col j into i; the new (i,i)
                        // entry is 2*m[i][j] != 0.
                        for c in 0..n {
                            let add = m[j][c].clone();
                            m[i][c] = &m[i][c] + &add;
                        }
                        for r in 0..n {
                            let add = m[r][j].clone();
                            m[r][i] = &m[r][i] + &add;
                        }
                        i
                    }
                }
            }
        };
        if pivot != start {
            m.swap(pivot, start);
            for row in m.iter_mut() {
                row.swap(pivot, start);
            }
        }
        let d = m[start][start].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for r in start + 1..n {
            if !m[r][start].is_zero() {
                let factor = &m[r][start] / &d;
                for c in 0..n {
                    m[r][c] = &m[r][c] - &factor * &m[start][c];
                }
            }
        }
        // Mirror the row eliminations on columns to preserve congruence;
        // row `start` is untouched above, so the factors still match.
        for c in start + 1..n {
            if !m[start][c].is_zero() {
                let factor = &m[start][c] / &d;
                for r in 0..n {
                    m[r][c] = &m[r][c] - &factor * &m[r][start];
                }
            }
        }
        start += 1;
    }
    (pos, neg, zero)
}

/// Column-reduces an integer matrix with unimodular column operations.
///
/// Returns `(u, reduced)` where `u` is the `n x n` unimodular transform with
/// `reduced = a * u`, and `reduced` has at most one pivot per processed row
/// with pivot columns deactivated left to right.
pub fn column_reduce(a: &[Vec<BigInt>], n: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut w: Vec<Vec<BigInt>> = a.to_vec();
    let rows = w.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for r in 0..rows {
        loop {
            let nonzero: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&j| !w[r][j].is_zero())
                .collect();
            if nonzero.len() <= 1 {
                if let Some(&j) = nonzero.first() {
                    if w[r][j].is_negative() {
                        negate_column(&mut w, &mut u, j);
                    }
                    pivots.push((r, j));
                    active.retain(|&c| c != j);
                }
                break;
            }
            // Reduce all nonzero entries against the one smallest in absolute
            // value (euclidean column reduction).
            let &jmin = nonzero
                .iter()
                .min_by_key(|&&j| w[r][j].abs())
                .expect("nonempty");
            for &j in &nonzero {
                if j == jmin {
                    continue;
                }
                let q = div_round(&w[r][j], &w[r][jmin]);
                if !q.is_zero() {
                    column_axpy(&mut w, &mut u, j, jmin, &q);
                }
            }
        }
    }
    let _ = pivots;
    (u, w)
}

/// Basis of the integer kernel `{x in Z^n : A x = 0}`; the returned columns
/// span a saturated sublattice.
pub fn integer_kernel(a: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let (u, w) = column_reduce(a, n);
    let rows = a.len();
    let mut kernel = Vec::new();
    for j in 0..n {
        if (0..rows).all(|r| w[r][j].is_zero()) {
            kernel.push((0..n).map(|i| u[i][j].clone()).collect());
        }
    }
    kernel
}

fn negate_column(w: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], j: usize) {
    for row in w.iter_mut() {
        row[j] = -row[j].clone();
    }
    for row in u.iter_mut() {
        row[j] = -row[j].clone();
    }
}

/// col_j -= q * col_k on both the working matrix and the transform.
fn column_axpy(w: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], j: usize, k: usize, q: &BigInt) {
    for row in w.iter_mut() {
        let sub = q * &row[k];
        row[j] = &row[j] - sub;
    }
    for row in u.iter_mut() {
        let sub = q * &row[k];
        row[j] = &row[j] - sub;
    }
}

/// Rounded integer division (nearest, ties toward zero) used by the
/// euclidean reduction steps.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if &r.abs() * &two > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + BigInt::one()
        } else {
            q - BigInt::one()
        }
    } else {
        q
    }
}
