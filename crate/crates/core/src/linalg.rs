//! Exact dense linear algebra over the rationals for the small systems that
//! show up here (body blocks, module dimensions, structure constants).

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_subset(rows: &[Vec<Rational>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Matrix = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut trial = basis.clone();
        trial.push(row.clone());
        if rank(&trial) > basis.len() {
            basis = trial;
            chosen.push(i);
        }
    }
    chosen
}

/// Basis of `{c : Σ c_i rows[i] = 0}`.
pub fn left_nullspace(rows: &[Vec<Rational>]) -> Matrix {
    let k = rows.len();
    if k == 0 {
        return Vec::new();
    }
    let width = rows[0].len();
    // Columns of the transposed system are the rows; solve A^T c = 0.
    let mut t: Matrix = (0..width).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
    let pivots = rref(&mut t);
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut c = vec![Rational::zero(); k];
            c[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                c[pc] = -t[r][f].clone();
            }
            c
        })
        .collect()
}

/// Determinant by Bareiss fraction-free elimination.
pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    if n == 0 {
        return Rational::one();
    }
    let mut m = a.to_vec();
    let mut sign = Rational::one();
    let mut prev = Rational::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Rational::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Gauss–Jordan inverse; `None` when singular.
pub fn inverse(a: &[Vec<Rational>]) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, p)| *p != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    Inconsistent,
    Underdetermined { free: usize },
}

/// Solves `A x = b`.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Solution {
    let unknowns = a.first().map_or(0, Vec::len);
    let mut aug: Matrix =
        a.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect()).collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&unknowns) {
        return Solution::Inconsistent;
    }
    if pivots.len() < unknowns {
        return Solution::Underdetermined { free: unknowns - pivots.len() };
    }
    Solution::Unique(aug.iter().take(unknowns).map(|row| row[unknowns].clone()).collect())
}
