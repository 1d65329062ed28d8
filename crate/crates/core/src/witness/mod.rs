//! Fixed-point-free maps on weak-star compact convex sets built from a bad
//! hyperplane: the coefficient shift `T`, the averaged contraction `S`, and
//! the sets `C_ε`.

pub mod poly;
pub mod simplex;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::batch::{self, Mode};
use crate::error::{Error, Result};
use crate::hyperplane::WfSpace;
use crate::rational::{int, RatStr, Rational};
use crate::sample;
use crate::seq::{GeomTail, L1Seq, SignPredicate, Subsequence};
pub use simplex::{QuasiTail, SimplexPoint};

/// Default cutoff for the subsequence `N⁺ ∩ [1, cutoff]`.
pub const DEFAULT_CUTOFF: usize = 32;

/// The generators `ξ_1 = w̃`, `ξ_{j+1} = basis[j]`.
#[derive(Clone, Debug)]
pub enum Basis {
    /// `basis[j] = e*_{n_{j+1}}` for a subsequence `(n_j)`.
    Units(Subsequence),
    Explicit(Vec<L1Seq>),
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub subsequence: Subsequence,
    pub e_star: L1Seq,
    pub u0: L1Seq,
    pub w0: L1Seq,
}

#[derive(Clone, Debug)]
pub struct GeneratorDict {
    pub w_tilde: L1Seq,
    pub basis: Basis,
    pub provenance: Option<Provenance>,
}

impl GeneratorDict {
    /// Number of basis elements, `None` when infinite.
    pub fn basis_len(&self) -> Option<usize> {
        match &self.basis {
            Basis::Units(s) => s.len(),
            Basis::Explicit(v) => Some(v.len()),
        }
    }

    /// `ξ_k`, 1-based.
    pub fn generator(&self, k: usize) -> Option<L1Seq> {
        if k == 1 {
            return Some(self.w_tilde.clone());
        }
        match &self.basis {
            Basis::Units(s) => s.nth(k - 2).map(L1Seq::unit),
            Basis::Explicit(v) => v.get(k - 2).cloned(),
        }
    }

    /// A user-supplied dictionary, validated against the norm-one and
    /// lower-`ℓ₁` certificates.
    pub fn custom(w_tilde: L1Seq, basis: Vec<L1Seq>, seed: u64) -> Result<Self> {
        let d = GeneratorDict { w_tilde, basis: Basis::Explicit(basis), provenance: None };
        d.check_norms()?;
        d.certify(seed, 64)?;
        Ok(d)
    }

    fn check_norms(&self) -> Result<()> {
        let count = self.basis_len().unwrap_or(16) + 1;
        for k in 1..=count {
            let g = self.generator(k).unwrap();
            if !g.l1_norm().is_one() {
                return Err(Error::hypothesis(format!("generator {k} does not have norm one")));
            }
        }
        Ok(())
    }

    /// Checks `‖Σ α_k ξ_k‖₁ ≥ Σ|α_k|` on `samples` seeded coefficient vectors.
    pub fn certify(&self, seed: u64, samples: usize) -> Result<Certificate> {
        let width = self.basis_len().unwrap_or(8).min(8) + 1;
        let gens: Vec<L1Seq> = (1..=width).map(|k| self.generator(k).unwrap()).collect();
        let mut rng = sample::rng(seed);
        let mut min_margin: Option<Rational> = None;
        for _ in 0..samples {
            let alpha: Vec<Rational> = (0..width).map(|_| sample::rational(&mut rng, 6, 5)).collect();
            let v = L1Seq::combination(alpha.iter().cloned().zip(gens.iter()))?;
            let lhs = v.l1_norm();
            let rhs: Rational = alpha.iter().map(|a| a.abs()).sum();
            let margin = &lhs - &rhs;
            if margin.is_negative() {
                return Err(Error::Check(format!(
                    "lower ℓ₁ estimate fails: ‖Σαξ‖ = {lhs} < Σ|α| = {rhs}"
                )));
            }
            if min_margin.as_ref().is_none_or(|m| &margin < m) {
                min_margin = Some(margin);
            }
        }
        Ok(Certificate { samples, width, min_margin: min_margin.map(RatStr) })
    }

    /// `λ₁·w̃ + Σ_j λ_{j+1}·basis[j]`.
    pub fn realize(&self, p: &SimplexPoint) -> Result<L1Seq> {
        let n = p.head().len();
        if let Some(len) = self.basis_len() {
            if n > len + 1 || p.tail().is_some() {
                return Err(Error::repr("point uses more generators than the dictionary holds"));
            }
        }
        let gens: Vec<L1Seq> = (1..=n).map(|k| self.generator(k).unwrap()).collect();
        let mut v = L1Seq::combination(p.head().iter().cloned().zip(gens.iter()))?;
        if let Some(t) = p.tail() {
            v = v.add(&self.realize_tail(t)?)?;
        }
        Ok(v)
    }

    fn realize_tail(&self, t: &QuasiTail) -> Result<L1Seq> {
        let Basis::Units(sub) = &self.basis else {
            return Err(Error::repr("coefficient tails need a closed-form generator family"));
        };
        let (Some(prog), true) = (sub.progression, t.poly.degree() == 0 && t.start >= 2) else {
            return Err(Error::repr("only constant-times-geometric tails over a progression are realizable"));
        };
        let j = t.start - 2;
        if j < sub.head.len() {
            return Err(Error::repr("coefficient tail starts inside the explicit head"));
        }
        let first = prog.nth(j - sub.head.len());
        let coef = t.poly.coeffs()[0].clone();
        Ok(L1Seq::with_tail([], GeomTail::new(first, prog.step, coef, t.ratio.clone())?)?)
    }

    /// `‖realize(p) − realize(q)‖₁`. Falls back to the coefficient distance
    /// when the points are not realizable in closed form; the two agree
    /// because the generators are norm one and satisfy the certificate.
    pub fn distance(&self, p: &SimplexPoint, q: &SimplexPoint) -> Result<(Rational, Via)> {
        match (self.realize(p), self.realize(q)) {
            (Ok(a), Ok(b)) => Ok((a.sub(&b)?.l1_norm(), Via::Realized)),
            _ => Ok((p.distance(q)?, Via::Coefficients)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Via {
    Realized,
    Coefficients,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub samples: usize,
    pub width: usize,
    pub min_margin: Option<RatStr>,
}

/// The witness dictionary of a bad `W_f` for a subsequence of `N⁺`.
pub fn build_witness(w: &WfSpace, subseq: Option<Subsequence>, seed: u64) -> Result<GeneratorDict> {
    if !w.classify().is_bad {
        return Err(Error::hypothesis("witness construction needs a bad W_f (is_bad = false)"));
    }
    let e_star = w.wstar_limit()?;
    let (sub, u0, w0) = match subseq {
        Some(s) => {
            check_in_n_plus(w, &s)?;
            let u0 = e_star.restrict_subsequence(&s);
            let w0 = e_star.sub(&u0)?;
            if w0.is_zero() {
                return Err(Error::hypothesis(
                    "w₀ = e* − u₀ vanishes for this subsequence; choose a different subsequence",
                ));
            }
            (s, u0, w0)
        }
        None => default_subsequence(w, &e_star)?,
    };
    let w_tilde = w0.scale(&w0.l1_norm().recip());
    let dict = GeneratorDict {
        w_tilde,
        basis: Basis::Units(sub.clone()),
        provenance: Some(Provenance { subsequence: sub, e_star, u0, w0 }),
    };
    dict.check_norms()?;
    dict.certify(seed, 64)?;
    Ok(dict)
}

fn check_in_n_plus(w: &WfSpace, s: &Subsequence) -> Result<()> {
    let f = w.f();
    let head = f.entry_sign(1);
    let ok = |n: usize| head * f.entry_sign(n + 1) <= 0;
    let bad = s.head.iter().copied().find(|&n| !ok(n));
    if let Some(n) = bad {
        return Err(Error::hypothesis(format!("index {n} is not in N⁺")));
    }
    if let Some(p) = s.progression {
        // the sign pattern is periodic beyond the horizon of f
        let span = f.horizon() + f.tails().iter().map(|t| 2 * t.step).fold(1, crate::rational::lcm) * p.step + 1;
        let count = span / p.step + 2;
        if let Some(n) = (0..count).map(|k| p.nth(k)).find(|&n| !ok(n)) {
            return Err(Error::hypothesis(format!("index {n} is not in N⁺")));
        }
    }
    Ok(())
}

/// `N⁺ ∩ [1, cutoff]`, dropping the largest index until `w₀ ≠ 0`.
fn default_subsequence(w: &WfSpace, e_star: &L1Seq) -> Result<(Subsequence, L1Seq, L1Seq)> {
    let mut head: Vec<usize> = w
        .f()
        .sign_set_iter(SignPredicate::DisagreesWithHead)
        .take_while(|&n| n <= DEFAULT_CUTOFF)
        .collect();
    loop {
        let s = Subsequence::finite(head.clone())?;
        let u0 = e_star.restrict_subsequence(&s);
        let w0 = e_star.sub(&u0)?;
        if !w0.is_zero() {
            return Ok((s, u0, w0));
        }
        if head.pop().is_none() {
            return Err(Error::hypothesis("e* = 0; no witness subsequence exists"));
        }
    }
}

/// Which fixed-point-free map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Shift,
    Contraction,
}

impl MapKind {
    pub fn apply(self, p: &SimplexPoint) -> Result<SimplexPoint> {
        match self {
            MapKind::Shift => Ok(p.shift()),
            MapKind::Contraction => p.contraction(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub before: RatStr,
    pub after: RatStr,
    pub margin: RatStr,
    pub via: Via,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonexpansiveReport {
    pub map: MapKind,
    pub pairs: usize,
    pub min_margin: Option<RatStr>,
    /// Every `p ≠ q` pair moved strictly closer.
    pub strict: bool,
    pub generator_norms_one: bool,
    pub reports: Vec<PairReport>,
}

/// Checks `‖M p − M q‖ ≤ ‖p − q‖` on every pair, exactly.
pub fn verify_map(
    d: &GeneratorDict,
    map: MapKind,
    pairs: &[(SimplexPoint, SimplexPoint)],
    mode: Mode,
) -> Result<NonexpansiveReport> {
    d.check_norms()?;
    let reports = batch::try_map(mode, pairs, |(p, q)| -> Result<(PairReport, bool)> {
        let (before, via1) = d.distance(p, q)?;
        let (mp, mq) = (map.apply(p)?, map.apply(q)?);
        let (after, via2) = d.distance(&mp, &mq)?;
        let margin = &before - &after;
        if margin.is_negative() {
            return Err(Error::Check(format!(
                "{map:?} expands a pair: {after} > {before}"
            )));
        }
        let strict = before.is_zero() || margin.is_positive();
        let via = if via1 == Via::Realized && via2 == Via::Realized { Via::Realized } else { Via::Coefficients };
        Ok((PairReport { before: RatStr(before), after: RatStr(after), margin: RatStr(margin), via }, strict))
    })?;
    let strict = reports.iter().all(|(_, s)| *s);
    let min_margin = reports.iter().map(|(r, _)| r.margin.0.clone()).min().map(RatStr);
    Ok(NonexpansiveReport {
        map,
        pairs: pairs.len(),
        min_margin,
        strict,
        generator_norms_one: true,
        reports: reports.into_iter().map(|(r, _)| r).collect(),
    })
}

/// The shift as a nonexpansive map.
pub fn verify_nonexpansive(
    d: &GeneratorDict,
    pairs: &[(SimplexPoint, SimplexPoint)],
    mode: Mode,
) -> Result<NonexpansiveReport> {
    verify_map(d, MapKind::Shift, pairs, mode)
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    pub map: MapKind,
    pub iterations: usize,
    /// `displacements[s][k] = ‖M^k p_s − M^{k+1} p_s‖`.
    pub displacements: Vec<Vec<RatStr>>,
}

/// Asserts `M p ≠ p` along each orbit and records the displacements.
pub fn fixed_point_free_check(
    d: &GeneratorDict,
    map: MapKind,
    samples: &[SimplexPoint],
    iterations: usize,
    mode: Mode,
) -> Result<FixedPointReport> {
    let displacements = batch::try_map(mode, samples, |p| -> Result<Vec<RatStr>> {
        let mut cur = p.clone();
        let mut out = Vec::with_capacity(iterations);
        for _ in 0..iterations.max(1) {
            let next = map.apply(&cur)?;
            let (dist, _) = d.distance(&cur, &next)?;
            if dist.is_zero() {
                return Err(Error::Check(format!("{map:?} has a fixed point")));
            }
            out.push(RatStr(dist));
            cur = next;
        }
        out.truncate(iterations);
        Ok(out)
    })?;
    Ok(FixedPointReport { map, iterations, displacements })
}

/// `C_ε = {α₁(1−ε)e*₁ + Σ_{i≥2} α_i e*_i : α ≥ 0, Σα = 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CEpsilonSet {
    pub epsilon: Rational,
}

impl CEpsilonSet {
    pub fn new(epsilon: Rational) -> Result<Self> {
        if epsilon <= Rational::zero() || epsilon >= Rational::one() {
            return Err(Error::hypothesis(format!("ε must lie in (0, 1), got {epsilon}")));
        }
        Ok(CEpsilonSet { epsilon })
    }

    pub fn point(&self, alpha: &SimplexPoint) -> Result<L1Seq> {
        if !alpha.is_finitely_supported() {
            return Err(Error::repr("C_ε points are built from finitely supported α"));
        }
        let scale = Rational::one() - &self.epsilon;
        Ok(L1Seq::from_finite(alpha.head().iter().enumerate().map(|(i, a)| {
            if i == 0 {
                (1, a * &scale)
            } else {
                (i + 1, a.clone())
            }
        })))
    }

    pub fn contains(&self, p: &L1Seq) -> bool {
        let a1 = p.entry(1) / (Rational::one() - &self.epsilon);
        let rest_nonneg = p.sign_set(SignPredicate::Negative) == crate::seq::SignSet::Finite(Default::default());
        !a1.is_negative() && rest_nonneg && a1 + p.signed_sum() - p.entry(1) == Rational::one()
    }
}

/// `f_ε`, its hyperplane, and the checks that it has the weak-star fixed
/// point property with `e* = (1−ε)e*₁`.
pub fn c_epsilon_fixture(eps: &Rational) -> Result<(CEpsilonSet, WfSpace)> {
    let set = CEpsilonSet::new(eps.clone())?;
    let w = crate::fixtures::f_eps(eps)?;
    if !w.classify().has_wstar_fpp.is_true() {
        return Err(Error::Check("f_ε should have the weak-star fixed point property".into()));
    }
    let expected = L1Seq::from_finite([(1, int(1) - eps)]);
    if w.wstar_limit()? != expected {
        return Err(Error::Check("e* ≠ (1−ε)e*₁ for f_ε".into()));
    }
    Ok((set, w))
}

/// Seeded random simplex points of the given width, with an occasional
/// halving tail when `tails` is set.
pub fn sample_points(rng: &mut impl Rng, count: usize, width: usize, tails: bool) -> Vec<SimplexPoint> {
    (0..count).map(|_| sample::simplex_point(rng, width, tails)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::rat;

    #[test]
    fn c_case_dictionary() {
        let sub = Subsequence::finite(vec![2, 3, 4, 5, 6]).unwrap();
        let d = build_witness(&fixtures::c_like(), Some(sub), 1).unwrap();
        assert_eq!(d.w_tilde, L1Seq::from_finite([(1, int(-1))]));
        let half = SimplexPoint::finite(vec![rat(1, 2), rat(1, 2)]).unwrap();
        let v = d.realize(&half).unwrap();
        assert_eq!(v, L1Seq::from_finite([(1, rat(-1, 2)), (2, rat(1, 2))]));
        assert_eq!(v.l1_norm(), int(1));
        assert_eq!(d.realize(&SimplexPoint::vertex(2)).unwrap(), L1Seq::unit(2));
        let default = build_witness(&fixtures::c_like(), None, 1).unwrap();
        assert_eq!(default.w_tilde, L1Seq::from_finite([(1, int(-1))]));
    }

    #[test]
    fn example22_odd_subsequence() {
        let sub = Subsequence::progression(crate::seq::Progression::new(1, 2).unwrap());
        let d = build_witness(&fixtures::example22(), Some(sub), 1).unwrap();
        let p = d.provenance.as_ref().unwrap();
        assert_eq!(p.w0.entry(2), rat(-1, 4));
        assert_eq!(p.w0.entry(3), int(0));
        assert_eq!(p.w0.l1_norm(), rat(1, 3));
        assert_eq!(d.w_tilde.l1_norm(), int(1));
        // a tail point realizes in closed form over the progression
        let h = SimplexPoint::halving().shift();
        let v = d.realize(&h).unwrap();
        assert_eq!(v.entry(1), rat(1, 2));
        assert_eq!(v.entry(3), rat(1, 4));
        assert_eq!(v.l1_norm(), int(1));
    }

    #[test]
    fn degenerate_and_bad_inputs() {
        let w = WfSpace::new(L1Seq::from_finite([(1, rat(1, 2)), (2, rat(-1, 2))])).unwrap();
        let sub = Subsequence::finite(vec![1]).unwrap();
        let e = build_witness(&w, Some(sub), 1).unwrap_err();
        assert!(e.to_string().contains("w₀"));
        let good = fixtures::f_eps(&rat(1, 2)).unwrap();
        assert_eq!(build_witness(&good, None, 1).unwrap_err().exit_code(), 2);
        let not_in = Subsequence::finite(vec![2]).unwrap();
        assert!(build_witness(&fixtures::example22(), Some(not_in), 1).is_err());
    }

    #[test]
    fn vertex_displacements() {
        let d = build_witness(&fixtures::c_like(), None, 1).unwrap();
        let r = fixed_point_free_check(&d, MapKind::Shift, &[SimplexPoint::vertex(1)], 5, Mode::Sequential).unwrap();
        assert!(r.displacements[0].iter().all(|x| x.0 == int(2)));
        let r = fixed_point_free_check(&d, MapKind::Contraction, &[SimplexPoint::vertex(1)], 1, Mode::Sequential).unwrap();
        assert_eq!(r.displacements[0][0].0, int(1));
        let pairs = vec![(SimplexPoint::vertex(1), SimplexPoint::vertex(2))];
        let r = verify_nonexpansive(&d, &pairs, Mode::Sequential).unwrap();
        assert_eq!(r.reports[0].before.0, int(2));
        assert_eq!(r.reports[0].after.0, int(2));
        let r = verify_map(&d, MapKind::Contraction, &pairs, Mode::Sequential).unwrap();
        assert_eq!(r.reports[0].after.0, int(1));
        assert!(r.strict);
        let same = vec![(SimplexPoint::vertex(1), SimplexPoint::vertex(1))];
        assert_eq!(verify_nonexpansive(&d, &same, Mode::Sequential).unwrap().reports[0].after.0, int(0));
    }

    #[test]
    fn c_epsilon() {
        let (set, w) = c_epsilon_fixture(&rat(1, 2)).unwrap();
        assert_eq!(w.f(), &L1Seq::from_finite([(1, rat(2, 3)), (2, rat(-1, 3))]));
        let p = set.point(&SimplexPoint::vertex(1)).unwrap();
        assert!(set.contains(&p));
        assert!(!set.contains(&L1Seq::unit(1)));
        assert!(c_epsilon_fixture(&int(0)).is_err());
    }

    #[test]
    fn custom_dictionary_certificate() {
        let ok = GeneratorDict::custom(L1Seq::unit(1), vec![L1Seq::unit(2), L1Seq::unit(3)], 3);
        assert!(ok.is_ok());
        let bad = GeneratorDict::custom(L1Seq::unit(1), vec![L1Seq::from_finite([(1, rat(1, 2)), (2, rat(1, 2))])], 3);
        assert!(bad.is_err());
    }
}
