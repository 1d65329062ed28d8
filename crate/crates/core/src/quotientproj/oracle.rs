//! Quotient norms from a linear program at finite truncation depth.
//!
//! Coordinates `n ≤ depth` get their own variables; every free coordinate
//! past the depth is aggregated into one variable `w` with
//! `|w| ≤ s·Σ_{free n > depth} |a_n|`, which keeps the program exact.

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::simplex::{minimize, Outcome};
use super::VanishingSubspace;
use crate::error::{Error, Result};
use crate::rational::{int, RatStr, Rational};
use crate::seq::CSeq;

pub const DEPTHS: [usize; 3] = [16, 32, 64];

/// Minimizes `s` over `|v(n) − y(n)| ≤ s` subject to `f(y) = 0`, with `y`
/// vanishing on `S` and at infinity.
pub fn lp_quotient_norm(y: &VanishingSubspace, v: &CSeq, depth: usize) -> Result<Rational> {
    if v.horizon() > depth {
        return Err(Error::hypothesis(format!(
            "truncation depth {depth} is below the horizon {} of v",
            v.horizon()
        )));
    }
    if !y.ambient().member(v) {
        return Err(Error::hypothesis("v is not in W_f"));
    }
    let a = y.weights();
    let l = v.limit();
    // coordinates fixed by S, and the limit
    let b = (1..=depth)
        .filter(|&n| !y.is_free(n))
        .map(|n| v.entry(n).abs())
        .fold(l.abs(), |m, x| if x > m { x } else { m });
    let free: Vec<(usize, Rational)> =
        (1..=depth).filter(|&n| y.is_free(n)).map(|n| (n, a.entry(n))).filter(|(_, a)| !a.is_zero()).collect();
    let near_mass: Rational = free.iter().map(|(_, a)| a.abs()).sum();
    let near_sum: Rational = free.iter().map(|(_, a)| a.clone()).sum();
    let far_mass = y.free_mass() - &near_mass;
    let far_sum = y.free_sum() - &near_sum;
    let c: Rational = free.iter().map(|(n, a)| a * v.entry(*n)).sum::<Rational>() + l * &far_sum;

    // variables: t, p_1..p_k, r_1..r_k, q, r_q with s = b + t,
    // u_n = p_n − s ∈ [−s, s], w = q − s·R ∈ [−sR, sR]
    let k = free.len();
    let cols = 2 * k + 3;
    let (ti, qi, rqi) = (0, 2 * k + 1, 2 * k + 2);
    let mut rows = Vec::with_capacity(k + 2);
    let mut rhs = Vec::with_capacity(k + 2);
    for i in 0..k {
        let mut r = vec![Rational::zero(); cols];
        r[ti] = int(-2);
        r[1 + i] = int(1);
        r[1 + k + i] = int(1);
        rows.push(r);
        rhs.push(int(2) * &b);
    }
    let mut r = vec![Rational::zero(); cols];
    r[ti] = int(-2) * &far_mass;
    r[qi] = int(1);
    r[rqi] = int(1);
    rows.push(r);
    rhs.push(int(2) * &far_mass * &b);
    let total = &near_sum + &far_mass;
    let mut r = vec![Rational::zero(); cols];
    r[ti] = -total.clone();
    for (i, (_, an)) in free.iter().enumerate() {
        r[1 + i] = an.clone();
    }
    r[qi] = int(1);
    rows.push(r);
    rhs.push(&c + &b * &total);
    let mut cost = vec![Rational::zero(); cols];
    cost[ti] = int(1);
    match minimize(&cost, &rows, &rhs)? {
        Outcome::Optimal { value, .. } => Ok(b + value),
        Outcome::Infeasible => Err(Error::hypothesis("the quotient program is infeasible")),
        Outcome::Unbounded => Err(Error::Check("the quotient program is unbounded".into())),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleComparison {
    #[serde(with = "crate::rational::serde_rat")]
    pub closed_form: Rational,
    pub oracle: Vec<(usize, RatStr)>,
    pub agree: bool,
}

/// The closed form against the program at each depth that covers `v`.
pub fn compare(y: &VanishingSubspace, v: &CSeq, depths: &[usize]) -> Result<OracleComparison> {
    let closed = super::quotient_norm(y, v)?.value;
    let mut oracle = Vec::new();
    for &d in depths.iter().filter(|&&d| d >= v.horizon()) {
        oracle.push((d, RatStr(lp_quotient_norm(y, v, d)?)));
    }
    if oracle.is_empty() {
        return Err(Error::hypothesis("no truncation depth covers the horizon of v"));
    }
    let agree = oracle.iter().all(|(_, o)| o.0 == closed);
    Ok(OracleComparison { closed_form: closed, oracle, agree })
}
