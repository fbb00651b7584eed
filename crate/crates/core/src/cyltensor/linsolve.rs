//! Exact linear solve `Σ c_k B_k = target` over the rationals, with one
//! unknown per basis expression and one equation per monomial.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::symexpr::{Coeff, Expression, Monomial};

#[derive(Clone, Debug)]
pub struct LinearFit {
    pub coefficients: Vec<Coeff>,
    /// `target - Σ c_k B_k`.
    pub residual: Expression,
    /// Columns left without a pivot (set to zero).
    pub free_columns: Vec<usize>,
}

impl LinearFit {
    pub fn is_exact(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn is_unique(&self) -> bool {
        self.free_columns.is_empty()
    }
}

pub fn solve(basis: &[Expression], target: &Expression) -> LinearFit {
    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    for e in basis.iter().chain(std::iter::once(target)) {
        for (m, _) in e.iter() {
            let n = rows.len();
            rows.entry(m.clone()).or_insert(n);
        }
    }
    let ncols = basis.len();
    let mut a: Vec<Vec<Coeff>> = vec![vec![Coeff::zero(); ncols + 1]; rows.len()];
    for (k, e) in basis.iter().enumerate() {
        for (m, c) in e.iter() {
            a[rows[m]][k] = c.clone();
        }
    }
    for (m, c) in target.iter() {
        a[rows[m]][ncols] = c.clone();
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next_row = 0;
    for col in 0..ncols {
        let Some(p) = (next_row..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(next_row, p);
        let inv = Coeff::one() / a[next_row][col].clone();
        for x in a[next_row].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = a[next_row].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == next_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &(&factor * p);
                }
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
    }

    let mut coefficients = vec![Coeff::zero(); ncols];
    for &(row, col) in &pivots {
        coefficients[col] = a[row][ncols].clone();
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_columns = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();

    let mut residual = target.clone();
    for (b, c) in basis.iter().zip(&coefficients) {
        if !c.is_zero() {
            residual = &residual - &b.scale(c);
        }
    }
    LinearFit {
        coefficients,
        residual,
        free_columns,
    }
}
