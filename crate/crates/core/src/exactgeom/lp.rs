//! Exact rational linear programming (two-phase primal simplex with
//! Bland's rule). Problem sizes here are tiny, so a dense tableau is fine;
//! exactness is what matters.
// Index-based loops mirror the matrix algebra; clearer than iterator chains here.
#![allow(clippy::needless_range_loop)]
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal {
        solution: Vec<Rational>,
        objective: Rational,
    },
    Infeasible,
    Unbounded,
}

/// Minimizes `c . x` subject to `A x = b`, `x >= 0`.
pub fn simplex_min(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    for row in a {
        assert_eq!(row.len(), n, "constraint row has wrong arity");
    }
    assert_eq!(b.len(), m);

    // Tableau over columns [original | artificial | rhs] with b >= 0.
    let cols = n + m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r: Vec<Rational> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        r.extend((0..m).map(|j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        r.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the sum of artificials.
    let phase1_cost: Vec<Rational> = (0..n + m)
        .map(|j| {
            if j >= n {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    if !run_phase(&mut t, &mut basis, &phase1_cost, cols) {
        unreachable!("phase 1 of a feasibility system cannot be unbounded");
    }
    let phase1_value: Rational = basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= n)
        .map(|(i, _)| t[i][cols - 1].clone())
        .sum();
    if !phase1_value.is_zero() {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut drop_rows = Vec::new();
    for i in 0..m {
        if basis[i] < n {
            continue;
        }
        match (0..n).find(|&j| !t[i][j].is_zero()) {
            Some(j) => {
                pivot(&mut t, &mut basis, i, j, cols);
            }
            None => drop_rows.push(i),
        }
    }
    for &i in drop_rows.iter().rev() {
        t.remove(i);
        basis.remove(i);
    }

    // Phase 2 on original costs, artificial columns banned.
    let mut phase2_cost: Vec<Rational> = c.to_vec();
    phase2_cost.extend(vec![Rational::zero(); m]);
    let banned = n;
    if !run_phase_banned(&mut t, &mut basis, &phase2_cost, cols, banned) {
        return LpOutcome::Unbounded;
    }

    let mut solution = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            solution[bv] = t[i][cols - 1].clone();
        }
    }
    let objective = c
        .iter()
        .zip(&solution)
        .map(|(ci, xi)| ci * xi)
        .sum();
    LpOutcome::Optimal {
        solution,
        objective,
    }
}

fn run_phase(
    t: &mut [Vec<Rational>],
    basis: &mut [usize],
    cost: &[Rational],
    cols: usize,
) -> bool {
    run_phase_banned(t, basis, cost, cols, cost.len())
}

/// Simplex iterations with Bland's rule; columns >= `banned` are excluded
/// from entering. Returns false on unboundedness.
fn run_phase_banned(
    t: &mut [Vec<Rational>],
    basis: &mut [usize],
    cost: &[Rational],
    cols: usize,
    banned: usize,
) -> bool {
    loop {
        // Reduced costs: cost[j] - sum_i cost[basis_i] * t[i][j].
        let entering = (0..banned.min(cols - 1)).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut reduced = cost[j].clone();
            for (i, &bv) in basis.iter().enumerate() {
                if !cost[bv].is_zero() && !t[i][j].is_zero() {
                    reduced -= &cost[bv] * &t[i][j];
                }
            }
            reduced.is_negative()
        });
        let Some(j) = entering else {
            return true;
        };
        // Ratio test with Bland tie-breaking on the leaving basic variable.
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..t.len() {
            if t[i][j].is_positive() {
                let ratio = &t[i][cols - 1] / &t[i][j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leave else {
            return false;
        };
        pivot(t, basis, i, j, cols);
    }
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], row: usize, col: usize, cols: usize) {
    let inv = t[row][col].recip();
    for cc in 0..cols {
        t[row][cc] = &t[row][cc] * &inv;
    }
    for r in 0..t.len() {
        if r != row && !t[r][col].is_zero() {
            let factor = t[r][col].clone();
            for cc in 0..cols {
                t[r][cc] = &t[r][cc] - &factor * &t[row][cc];
            }
        }
    }
    basis[row] = col;
}

/// Finds `lambda >= 0` with `sum lambda_j columns_j = target`, if one exists.
pub fn nonneg_combination(
    columns: &[Vec<Rational>],
    target: &[Rational],
) -> Option<Vec<Rational>> {
    let m = target.len();
    let n = columns.len();
    let a: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..n).map(|j| columns[j][i].clone()).collect())
        .collect();
    let c = vec![Rational::zero(); n];
    match simplex_min(&a, target, &c) {
        LpOutcome::Optimal { solution, .. } => Some(solution),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarMax {
    Value(Rational),
    Infeasible,
    Unbounded,
}

/// Maximizes `s >= 0` subject to `s * direction + sum lambda_j columns_j =
/// target`, `lambda >= 0`.
pub fn max_scalar_in_cone(
    columns: &[Vec<Rational>],
    direction: &[Rational],
    target: &[Rational],
) -> ScalarMax {
    let m = target.len();
    let n = columns.len();
    let a: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(n + 1);
            row.push(direction[i].clone());
            row.extend((0..n).map(|j| columns[j][i].clone()));
            row
        })
        .collect();
    let mut c = vec![Rational::zero(); n + 1];
    c[0] = -Rational::one();
    match simplex_min(&a, target, &c) {
        LpOutcome::Optimal { solution, .. } => ScalarMax::Value(solution[0].clone()),
        LpOutcome::Infeasible => ScalarMax::Infeasible,
        LpOutcome::Unbounded => ScalarMax::Unbounded,
    }
}

/// Finds `w` with `<w, v> >= 1` on `strict_pos`, `= 0` on `zero`, and
/// `<= -1` on `strict_neg`. Used for exact separation certificates.
pub fn separating_vector(
    dim: usize,
    strict_pos: &[Vec<Rational>],
    zero: &[Vec<Rational>],
    strict_neg: &[Vec<Rational>],
) -> Option<Vec<Rational>> {
    // Variables: w+ (dim), w- (dim), surplus s (pos rows), slack t (neg rows).
    let npos = strict_pos.len();
    let nneg = strict_neg.len();
    let nvars = 2 * dim + npos + nneg;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut row_for = |v: &[Rational], extra: Option<(usize, Rational)>, rhs: Rational| {
        let mut row = vec![Rational::zero(); nvars];
        for (k, coord) in v.iter().enumerate() {
            row[k] = coord.clone();
            row[dim + k] = -coord.clone();
        }
        if let Some((idx, coeff)) = extra {
            row[idx] = coeff;
        }
        a.push(row);
        b.push(rhs);
    };
    for (i, v) in strict_pos.iter().enumerate() {
        row_for(v, Some((2 * dim + i, -Rational::one())), Rational::one());
    }
    for v in zero {
        row_for(v, None, Rational::zero());
    }
    for (i, v) in strict_neg.iter().enumerate() {
        row_for(
            v,
            Some((2 * dim + npos + i, Rational::one())),
            -Rational::one(),
        );
    }
    let c = vec![Rational::zero(); nvars];
    match simplex_min(&a, &b, &c) {
        LpOutcome::Optimal { solution, .. } => Some(
            (0..dim)
                .map(|k| &solution[k] - &solution[dim + k])
                .collect(),
        ),
        _ => None,
    }
}
