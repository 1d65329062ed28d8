//! Quotients of `W_f` by coordinate-vanishing subspaces, and norm-one
//! projections onto copies of `c`.

pub mod oracle;
pub mod projection;
pub mod simplex;

pub use projection::{projection, projection_checks, Ambient, ProjectionData, ProjectionReport};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperplane::WfSpace;
use crate::rational::{rat, sgn, RatStr, Rational};
use crate::seq::{CSeq, L1Seq, Progression};

/// `Y = {y ∈ W_f : y(i) = 0 for i ∈ S}` for an arithmetic progression `S`.
///
/// `S` is infinite, so every `y ∈ Y` has limit zero.
#[derive(Clone, Debug)]
pub struct VanishingSubspace {
    ambient: WfSpace,
    zero_indices: Progression,
    /// `a_n = f(n+1)`
    a: L1Seq,
}

impl VanishingSubspace {
    pub fn new(ambient: WfSpace, zero_indices: Progression) -> Self {
        let a = ambient.f().shift_left(1);
        VanishingSubspace { ambient, zero_indices, a }
    }

    pub fn ambient(&self) -> &WfSpace {
        &self.ambient
    }

    pub fn zero_indices(&self) -> Progression {
        self.zero_indices
    }

    /// The constraint weights `a_n = f(n+1)`.
    pub fn weights(&self) -> &L1Seq {
        &self.a
    }

    pub fn is_free(&self, n: usize) -> bool {
        !self.zero_indices.contains(n)
    }

    pub fn contains(&self, y: &CSeq) -> bool {
        self.ambient.member(y)
            && y.limit().is_zero()
            && y.prefix().iter().all(|(&i, v)| v.is_zero() || self.is_free(i))
    }

    /// `Σ_{n free} |a_n|`
    pub fn free_mass(&self) -> Rational {
        self.a.l1_norm() - self.a.abs_sum_over(&self.zero_indices)
    }

    /// `Σ_{n free} a_n`
    pub fn free_sum(&self) -> Rational {
        self.a.signed_sum() - self.a.sum_over(&self.zero_indices)
    }

    /// `Σ_{n free} a_n v(n)`
    pub fn free_pairing(&self, v: &CSeq) -> Rational {
        let l = v.limit();
        let near: Rational = (1..=v.horizon())
            .filter(|&n| self.is_free(n))
            .map(|n| self.a.entry(n) * (v.entry(n) - l))
            .sum();
        near + l * self.free_sum()
    }

    /// Generators of `Y^⊥`: the limit functional, the coordinates in `S` up
    /// to `bound`, and `f`.
    pub fn annihilator_generators(&self, bound: usize) -> Vec<L1Seq> {
        let mut out = vec![L1Seq::unit(1), self.ambient.f().clone()];
        out.extend(
            (0..)
                .map(|k| self.zero_indices.nth(k))
                .take_while(|&i| i <= bound)
                .map(|i| L1Seq::unit(i + 1)),
        );
        out
    }
}

/// `‖v + Y‖` with its two ingredients.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientNorm {
    /// `max(sup_{i∈S} |v(i)|, |lim v|)`
    #[serde(rename = "B", with = "crate::rational::serde_rat")]
    pub b: Rational,
    /// `|Σ_free a_n v(n)| / Σ_free |a_n|`, absent when the free weights vanish
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<RatStr>,
    #[serde(with = "crate::rational::serde_rat")]
    pub value: Rational,
}

pub fn quotient_norm(y: &VanishingSubspace, v: &CSeq) -> Result<QuotientNorm> {
    if !y.ambient.member(v) {
        return Err(Error::hypothesis(format!("v is not in W_f: f(v) = {}", y.ambient.f().pair_c(v))));
    }
    let b = v
        .prefix()
        .iter()
        .filter(|(&i, _)| !y.is_free(i))
        .map(|(_, x)| x.abs())
        .fold(v.limit().abs(), |m, x| if x > m { x } else { m });
    let mass = y.free_mass();
    let c = y.free_pairing(v);
    let d = if mass.is_zero() {
        if !c.is_zero() {
            return Err(Error::hypothesis("no free weights but the constraint is violated"));
        }
        None
    } else {
        Some(c.abs() / mass)
    };
    let value = match &d {
        Some(d) if *d > b => d.clone(),
        _ => b.clone(),
    };
    Ok(QuotientNorm { b, d: d.map(RatStr), value })
}

/// Some `y ∈ Y` with `‖v − y‖ ≤ ‖v + Y‖ + margin`.
///
/// The infimum need not be attained by an eventually constant `y`, so a
/// positive margin may be required.
pub fn quotient_witness(y: &VanishingSubspace, v: &CSeq, margin: &Rational) -> Result<CSeq> {
    if margin.is_negative() {
        return Err(Error::hypothesis("the margin must be nonnegative"));
    }
    let q = quotient_norm(y, v)?;
    let goal = &q.value + margin;
    let l = v.limit().clone();
    let h = v.horizon();
    let total = y.free_sum();
    let c = y.free_pairing(v);
    // u = v − y on free coordinates: t·sgn a_n up to the cut, l afterwards
    let build = |cut: usize, t: &Rational| -> CSeq {
        let end = cut.max(h);
        let entries = (1..=end).filter(|&n| y.is_free(n)).map(|n| {
            let a = y.a.entry(n);
            let u = if n <= cut && !a.is_zero() { t * sgn(&a) } else { l.clone() };
            (n, v.entry(n) - u)
        });
        CSeq::from_entries(entries, Rational::zero()).canonical()
    };
    if y.free_mass().is_zero() {
        return Ok(build(0, &Rational::zero()));
    }
    let mut seen = Rational::zero();
    let mut partial = Rational::zero();
    for (n, a) in y.a.nonzero_entries().filter(|(n, _)| y.is_free(*n)).take(MAX_WITNESS_CUT) {
        seen += a.abs();
        partial += &a;
        let rest = &total - &partial;
        let t = (&c - &l * rest) / &seen;
        if t.abs() <= goal {
            let w = build(n, &t);
            debug_assert!(y.contains(&w));
            return Ok(w);
        }
    }
    Err(Error::repr(format!(
        "no witness within margin {margin} among the first {MAX_WITNESS_CUT} free coordinates"
    )))
}

const MAX_WITNESS_CUT: usize = 4096;

/// The `example31` hyperplane with `S` the even indices.
pub fn example31_subspace() -> VanishingSubspace {
    VanishingSubspace::new(crate::fixtures::example31(), Progression { start: 2, step: 2 })
}

#[derive(Clone, Debug, Serialize)]
pub struct IsometryImage {
    pub representative: CSeq,
    pub quotient: QuotientNorm,
    #[serde(with = "crate::rational::serde_rat")]
    pub sup_norm: Rational,
}

/// `T(x) = (7/3·x(0), x(1), x(0), x(2), x(0), …) + Y`, checked to lie in
/// `W_f` and to preserve the norm.
pub fn example31_isometry(x: &CSeq) -> Result<IsometryImage> {
    let y = example31_subspace();
    let l = x.limit().clone();
    let mut entries = vec![(1, rat(7, 3) * &l)];
    entries.extend((1..=x.horizon()).map(|k| (2 * k, x.entry(k))));
    let rep = CSeq::from_entries(entries, l).canonical();
    if !y.ambient.member(&rep) {
        return Err(Error::Check("T(x) is not in W_f".into()));
    }
    let q = quotient_norm(&y, &rep)?;
    let sup = x.sup_norm();
    if q.value != sup {
        return Err(Error::Check(format!("‖T(x) + Y‖ = {} ≠ ‖x‖ = {sup}", q.value)));
    }
    Ok(IsometryImage { representative: rep, quotient: q, sup_norm: sup })
}

/// A quotient of `W_f` isometric to `c` although `W_f` has no subspace
/// isometric to `c`.
#[derive(Clone, Debug, Serialize)]
pub struct Separation {
    pub quotient_isometric_to_c: bool,
    pub contains_c: crate::hyperplane::Tri,
    pub samples: usize,
}

pub fn example31_separation(samples: &[CSeq]) -> Result<Separation> {
    for x in samples {
        example31_isometry(x)?;
    }
    let contains_c = crate::fixtures::example31().classify().contains_c;
    Ok(Separation { quotient_isometric_to_c: true, contains_c, samples: samples.len() })
}

impl QuotientNorm {
    pub fn is_attained_by(&self, v: &CSeq, y: &CSeq) -> bool {
        v.sub(y).sup_norm() == self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperplane::Tri;
    use crate::rational::int;

    #[test]
    fn example_values() {
        let y = example31_subspace();
        let t = example31_isometry(&CSeq::ones()).unwrap();
        assert_eq!(t.representative.entry(1), rat(7, 3));
        assert_eq!(t.representative.entry(7), int(1));
        assert_eq!(t.quotient.value, int(1));
        assert_eq!(t.quotient.b, int(1));
        assert_eq!(t.quotient.d.as_ref().unwrap().0, int(1));

        assert_eq!(quotient_norm(&y, &CSeq::zero()).unwrap().value, int(0));

        let x = CSeq::from_entries([(1, int(-2))], int(0));
        let t = example31_isometry(&x).unwrap();
        assert_eq!(t.representative.entry(2), int(-2));
        assert_eq!(t.representative.entry(1), int(0));
        assert_eq!(t.representative.entry(3), int(0));
        assert_eq!(t.quotient.value, int(2));
    }

    #[test]
    fn members_of_y_have_zero_norm() {
        let y = example31_subspace();
        // a_1 = 1/4, a_3 = −1/8
        let v = CSeq::from_entries([(1, int(1)), (3, int(2))], int(0));
        assert!(y.contains(&v));
        assert_eq!(quotient_norm(&y, &v).unwrap().value, int(0));
        assert!(quotient_norm(&y, &CSeq::from_entries([(1, int(1))], int(0))).is_err());
    }

    #[test]
    fn witnesses_approach_the_value() {
        let y = example31_subspace();
        let v = example31_isometry(&CSeq::ones()).unwrap().representative;
        let q = quotient_norm(&y, &v).unwrap();
        for margin in [rat(1, 10), rat(1, 1000)] {
            let w = quotient_witness(&y, &v, &margin).unwrap();
            assert!(y.contains(&w));
            let d = v.sub(&w).sup_norm();
            assert!(d >= q.value && d <= &q.value + &margin);
        }
        let x = CSeq::from_entries([(1, int(-2))], int(0));
        let v = example31_isometry(&x).unwrap().representative;
        let w = quotient_witness(&y, &v, &int(0)).unwrap();
        assert!(quotient_norm(&y, &v).unwrap().is_attained_by(&v, &w));
    }

    #[test]
    fn separation() {
        let s = example31_separation(&[CSeq::ones()]).unwrap();
        assert!(s.quotient_isometric_to_c);
        assert_eq!(s.contains_c, Tri::False);
    }
}
