//! Dense two-phase simplex over the rationals with Bland's rule.
//!
//! Solves `min cᵀx` subject to `Ax = b`, `x ≥ 0`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// rows of `[A | b]`
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let m = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &m * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.cols]
    }

    /// Minimizes `cost` over the columns `allowed`; `false` when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            // reduced cost c_j − c_Bᵀ B⁻¹A_j; Bland: smallest improving j
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut red = cost[j].clone();
                for (r, &bj) in self.basis.iter().enumerate() {
                    if !cost[bj].is_zero() && !self.rows[r][j].is_zero() {
                        red -= &cost[bj] * &self.rows[r][j];
                    }
                }
                red.is_negative()
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][j];
                if a.is_positive() {
                    let ratio = self.rhs(r) / a;
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return false,
            }
        }
    }
}

pub fn minimize(cost: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Result<Outcome> {
    let n = cost.len();
    if a.len() != b.len() || a.iter().any(|r| r.len() != n) {
        return Err(Error::hypothesis("LP dimensions disagree"));
    }
    let m = a.len();
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (row, bi) in a.iter().zip(b) {
        let flip = bi.is_negative();
        let mut r: Vec<Rational> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        r.push(if flip { -bi } else { bi.clone() });
        rows.push(r);
    }
    // reuse unit columns as the starting basis, add artificials elsewhere
    let mut basis = vec![usize::MAX; m];
    for j in 0..n {
        let nz: Vec<usize> = (0..m).filter(|&i| !rows[i][j].is_zero()).collect();
        if let [i] = nz[..] {
            if rows[i][j].is_one() && basis[i] == usize::MAX {
                basis[i] = j;
            }
        }
    }
    let missing: Vec<usize> = (0..m).filter(|&i| basis[i] == usize::MAX).collect();
    let cols = n + missing.len();
    for r in rows.iter_mut() {
        let rhs = r.pop().unwrap();
        r.resize(cols, Rational::zero());
        r.push(rhs);
    }
    for (k, &i) in missing.iter().enumerate() {
        rows[i][n + k] = Rational::one();
        basis[i] = n + k;
    }
    let mut t = Tableau { rows, basis, cols };
    if !missing.is_empty() {
        let phase1: Vec<Rational> = (0..cols).map(|j| if j >= n { Rational::one() } else { Rational::zero() }).collect();
        t.optimize(&phase1, cols);
        let infeas: Rational = (0..m).filter(|&r| t.basis[r] >= n).map(|r| t.rhs(r).clone()).sum();
        if infeas.is_positive() {
            return Ok(Outcome::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..m {
            if t.basis[r] >= n {
                if let Some(j) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, j);
                }
            }
        }
    }
    let mut full_cost = cost.to_vec();
    full_cost.resize(cols, Rational::zero());
    if !t.optimize(&full_cost, n) {
        return Ok(Outcome::Unbounded);
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = t.rhs(r).clone();
        }
    }
    let value = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(Outcome::Optimal { value, x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_programs() {
        // min −x − y, x + 2y + s = 4, 3x + y + t = 6
        let out = minimize(&v(&[-1, -1, 0, 0]), &[v(&[1, 2, 1, 0]), v(&[3, 1, 0, 1])], &v(&[4, 6])).unwrap();
        match out {
            Outcome::Optimal { value, x } => {
                assert_eq!(value, rat(-14, 5));
                assert_eq!(x[..2], [rat(8, 5), rat(6, 5)]);
            }
            o => panic!("{o:?}"),
        }
        // x − y = −1, x + y = 3 with artificials
        let out = minimize(&v(&[1, 0]), &[v(&[1, -1]), v(&[1, 1])], &v(&[-1, 3])).unwrap();
        assert_eq!(out, Outcome::Optimal { value: int(1), x: v(&[1, 2]) });
        assert_eq!(minimize(&v(&[1]), &[v(&[1]), v(&[1])], &v(&[1, 2])).unwrap(), Outcome::Infeasible);
        assert_eq!(minimize(&v(&[-1, 0]), &[v(&[1, -1])], &v(&[0])).unwrap(), Outcome::Unbounded);
    }
}
