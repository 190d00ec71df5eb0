//! Sparse exact Gaussian elimination.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Square system `A x = b` with sparse rows.
#[derive(Clone, Debug, Default)]
pub struct SparseSystem {
    rows: Vec<BTreeMap<usize, Rational>>,
    rhs: Vec<Rational>,
}

impl SparseSystem {
    pub fn new(n: usize) -> Self {
        SparseSystem { rows: vec![BTreeMap::new(); n], rhs: vec![Rational::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn add(&mut self, row: usize, col: usize, value: Rational) {
        let e = self.rows[row].entry(col).or_insert_with(Rational::zero);
        *e += value;
        if e.is_zero() {
            self.rows[row].remove(&col);
        }
    }

    pub fn add_rhs(&mut self, row: usize, value: Rational) {
        self.rhs[row] += value;
    }

    /// Solves by eliminating variable `order[k]` with row `order[k]` as pivot.
    /// Suitable for systems whose diagonal pivots stay nonzero in every order,
    /// such as `I - Q` for a transient substochastic `Q`.
    pub fn solve(mut self, order: &[usize]) -> Result<Vec<Rational>> {
        let n = self.len();
        if order.len() != n {
            return Err(Error::Internal("elimination order has wrong length".into()));
        }
        let mut rows_with: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row.keys() {
                rows_with[c].insert(r);
            }
        }
        let mut done = vec![false; n];
        for &v in order {
            let pivot = self.rows[v].get(&v).cloned().filter(|p| !p.is_zero());
            let pivot = pivot.ok_or_else(|| Error::Internal(format!("zero pivot at variable {v}")))?;
            done[v] = true;
            let pivot_row = std::mem::take(&mut self.rows[v]);
            let pivot_row: BTreeMap<usize, Rational> = pivot_row.into_iter().map(|(c, a)| (c, a / &pivot)).collect();
            self.rhs[v] = &self.rhs[v] / &pivot;
            for &c in pivot_row.keys() {
                rows_with[c].remove(&v);
            }
            let targets: Vec<usize> = rows_with[v].iter().copied().filter(|&r| !done[r]).collect();
            for r in targets {
                let factor = match self.rows[r].remove(&v) {
                    Some(f) => f,
                    None => continue,
                };
                rows_with[v].remove(&r);
                for (&c, a) in &pivot_row {
                    if c == v {
                        continue;
                    }
                    let e = self.rows[r].entry(c).or_insert_with(Rational::zero);
                    *e -= &factor * a;
                    if e.is_zero() {
                        self.rows[r].remove(&c);
                        rows_with[c].remove(&r);
                    } else {
                        rows_with[c].insert(r);
                    }
                }
                let delta = &factor * &self.rhs[v];
                self.rhs[r] -= delta;
            }
            self.rows[v] = pivot_row;
        }
        let mut x = vec![Rational::zero(); n];
        for &v in order.iter().rev() {
            let mut acc = self.rhs[v].clone();
            for (&c, a) in &self.rows[v] {
                if c != v {
                    acc -= a * &x[c];
                }
            }
            x[v] = acc;
        }
        Ok(x)
    }
}
