//! Polynomials with rational coefficients in the monomial basis, and the
//! closed-form sums `Σ_{u≥0} P(u)·r^u` used by quasi-geometric tails.

use num_traits::{One, Signed, Zero};

use crate::rational::{int, pow, Rational};

/// `Σ_j c[j]·u^j`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial at 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, u: usize) -> Rational {
        let u = int(u as i64);
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * &u + c)
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let z = Rational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + other.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    /// The interpolant through `(u, values[u])`, `u = 0..len`.
    pub fn from_values(values: &[Rational]) -> Poly {
        // Newton forward differences, then expand the binomial basis.
        let diffs = forward_differences(values);
        let mut out = Poly::new(vec![]);
        // binom(u, j) as a monomial-basis polynomial, built incrementally
        let mut basis = Poly::constant(Rational::one());
        for (j, d) in diffs.iter().enumerate() {
            out = out.add(&basis.scale(d));
            // binom(u, j+1) = binom(u, j)·(u − j)/(j + 1)
            basis = basis.mul_linear(&int(-(j as i64))).scale(&int(j as i64 + 1).recip());
        }
        out
    }

    /// `P(u)·(u + a)`.
    fn mul_linear(&self, a: &Rational) -> Poly {
        let mut c = vec![Rational::zero(); self.0.len() + 1];
        for (i, x) in self.0.iter().enumerate() {
            c[i + 1] += x;
            c[i] += x * a;
        }
        Poly::new(c)
    }

    /// `u ↦ P(u + k)`.
    pub fn shift(&self, k: usize) -> Poly {
        let vals: Vec<Rational> = (0..=self.degree()).map(|u| self.eval(u + k)).collect();
        Poly::from_values(&vals)
    }

    /// `Q(u) = Σ_{t=0}^{u} P(t)`.
    pub fn prefix_sum(&self) -> Poly {
        let mut acc = Rational::zero();
        let vals: Vec<Rational> = (0..=self.degree() + 1)
            .map(|u| {
                acc += self.eval(u);
                acc.clone()
            })
            .collect();
        Poly::from_values(&vals)
    }

    /// `Σ_{u≥0} P(u)·r^u` for `|r| < 1`.
    pub fn geometric_sum(&self, r: &Rational) -> Rational {
        let vals: Vec<Rational> = (0..=self.degree()).map(|u| self.eval(u)).collect();
        let one_minus = Rational::one() - r;
        forward_differences(&vals)
            .iter()
            .enumerate()
            .map(|(j, d)| d * pow(r, j) / pow(&one_minus, j + 1))
            .sum()
    }

    /// An integer `U` beyond which `P` has no roots (Cauchy bound).
    pub fn root_free_from(&self) -> usize {
        if self.0.len() <= 1 {
            return 0;
        }
        let lead = self.0.last().unwrap().abs();
        let m = self.0[..self.0.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        let bound = (Rational::one() + m).ceil();
        num_traits::ToPrimitive::to_usize(bound.numer()).unwrap_or(usize::MAX) + 1
    }

    /// Sign of `P(u)` for all large `u`.
    pub fn eventual_sign(&self) -> i8 {
        match self.0.last() {
            None => 0,
            Some(c) if c.is_positive() => 1,
            Some(_) => -1,
        }
    }

    /// `Σ_{u≥0} |P(u)·r^u|` for `|r| < 1`.
    pub fn abs_geometric_sum(&self, r: &Rational) -> Rational {
        let r = &r.abs();
        let big_u = self.root_free_from();
        let head: Rational = (0..big_u).map(|u| self.eval(u).abs() * pow(r, u)).sum();
        let tail = self.shift(big_u).geometric_sum(r) * pow(r, big_u);
        head + tail * int(self.eventual_sign() as i64)
    }

    /// `P(u) ≥ 0` for every `u ≥ 0`.
    pub fn nonnegative(&self) -> bool {
        (0..self.root_free_from()).all(|u| !self.eval(u).is_negative()) && self.eventual_sign() >= 0
    }
}

fn forward_differences(values: &[Rational]) -> Vec<Rational> {
    let mut row = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    while !row.is_empty() {
        out.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let q = p(&[3, -2, 5]);
        let vals: Vec<_> = (0..3).map(|u| q.eval(u)).collect();
        assert_eq!(Poly::from_values(&vals), q);
        assert_eq!(q.shift(2).eval(0), q.eval(2));
    }

    #[test]
    fn prefix_sums() {
        // Σ_{t≤u} t = u(u+1)/2
        let q = p(&[0, 1]).prefix_sum();
        assert_eq!(q.coeffs(), &[int(0), rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn geometric_sums_match_direct_accumulation() {
        let r = rat(1, 2);
        assert_eq!(p(&[1]).geometric_sum(&r), int(2));
        // Σ u/2^u = 2
        assert_eq!(p(&[0, 1]).geometric_sum(&r), int(2));
        let q = p(&[1, -3, 1]);
        let direct: f64 = (0..200).map(|u| crate::rational::to_f64(&(q.eval(u) * pow(&r, u)))).sum();
        assert!((crate::rational::to_f64(&q.geometric_sum(&r)) - direct).abs() < 1e-12);
        let direct_abs: f64 = (0..200).map(|u| crate::rational::to_f64(&(q.eval(u).abs() * pow(&r, u)))).sum();
        assert!((crate::rational::to_f64(&q.abs_geometric_sum(&r)) - direct_abs).abs() < 1e-12);
        assert!(!q.nonnegative());
        assert!(p(&[0, 0, 1]).nonnegative());
    }
}
