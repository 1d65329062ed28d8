//! Hyperplanes `W_f = {x ∈ c : f(x) = 0}` of `c` for a unit functional `f`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{clamp, rat, sgn, Rational};
use crate::seq::{CSeq, L1Seq, SignPredicate, SignSet};

/// A three-valued answer for predicates that are only decided under extra
/// hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    NotApplicable,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }
}

impl Serialize for Tri {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tri::True => s.serialize_bool(true),
            Tri::False => s.serialize_bool(false),
            Tri::NotApplicable => s.serialize_str("not-applicable"),
        }
    }
}

/// The classification of a hyperplane, one field per predicate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub dual_iso_ell1: bool,
    pub iso_c: bool,
    pub contains_c: Tri,
    pub has_wstar_fpp: Tri,
    pub is_bad: bool,
    /// `{n : f(1)f(n+1) ≤ 0}`
    pub n_plus: SignSet,
    pub advisories: Vec<String>,
}

impl Classification {
    /// Citation tag for each field, see [`crate::citations`].
    pub fn witnesses() -> BTreeMap<&'static str, &'static str> {
        BTreeMap::from([
            ("dual_iso_ell1", "fact:dual-l1"),
            ("iso_c", "fact:iso-c"),
            ("contains_c", "prop:c-subspace"),
            ("has_wstar_fpp", "prop:wstar-fpp"),
            ("is_bad", "def:bad-hyperplane"),
        ])
    }
}

/// The hyperplane of `c` cut out by a norm-one `f ∈ ℓ₁ = c*`.
#[derive(Clone, Debug, PartialEq)]
pub struct WfSpace {
    f: L1Seq,
}

impl WfSpace {
    /// Rejects `‖f‖ ≠ 1`.
    pub fn new(f: L1Seq) -> Result<Self> {
        let n = f.l1_norm();
        if !n.is_one() {
            return Err(Error::hypothesis(format!("norm-one hypothesis violated: ‖f‖ = {n}")));
        }
        Ok(WfSpace { f })
    }

    /// Divides `f` by its norm first.
    pub fn normalized(f: L1Seq) -> Result<Self> {
        let n = f.l1_norm();
        if n.is_zero() {
            return Err(Error::hypothesis("cannot normalize the zero functional"));
        }
        WfSpace::new(f.scale(&n.recip()))
    }

    pub fn f(&self) -> &L1Seq {
        &self.f
    }

    pub fn head(&self) -> Rational {
        self.f.entry(1)
    }

    pub fn member(&self, x: &CSeq) -> bool {
        self.f.pair_c(x).is_zero()
    }

    /// Some `|f(j)| = 1/2` with `j ≥ 2`.
    pub fn on_boundary(&self) -> bool {
        let half = rat(1, 2);
        self.f.max_abs_from(2) == half
    }

    pub fn classify(&self) -> Classification {
        let half = rat(1, 2);
        let a1 = self.head().abs();
        let rest = self.f.max_abs_from(2);
        let dual_iso_ell1 = a1 >= half || rest >= half;
        let iso_c = rest >= half;
        let n_plus = self.f.sign_set(SignPredicate::DisagreesWithHead);

        let contains_c = if a1 >= half {
            Tri::from_bool(
                a1 == half
                    && self.f.sign_set(SignPredicate::AgreesWithHead).is_finite()
                    && !self.f.sign_set(SignPredicate::Zero).is_finite(),
            )
        } else {
            Tri::NotApplicable
        };
        let has_wstar_fpp = if a1 >= half && a1 < Rational::one() && rest < half {
            Tri::from_bool(a1 > half || n_plus.is_finite())
        } else {
            Tri::NotApplicable
        };
        let is_bad = a1 == half && !n_plus.is_finite();

        let mut advisories = Vec::new();
        if rest == half {
            advisories.push(
                "boundary case: |f(j)| = 1/2 for some j ≥ 2; the coordinate dual action is used outside its strict hypothesis".to_string(),
            );
        }
        Classification { dual_iso_ell1, iso_c, contains_c, has_wstar_fpp, is_bad, n_plus, advisories }
    }

    /// Hypotheses of the coordinate dual action: `|f(1)| ≥ 1/2` and
    /// `|f(j)| ≤ 1/2` for `j ≥ 2` (equality being the advisory boundary).
    pub fn check_dual_hypotheses(&self) -> Result<()> {
        let half = rat(1, 2);
        if self.head().abs() < half {
            return Err(Error::hypothesis("dual action needs |f(1)| ≥ 1/2"));
        }
        if self.f.max_abs_from(2) > half {
            return Err(Error::hypothesis("dual action needs |f(j)| ≤ 1/2 for every j ≥ 2"));
        }
        Ok(())
    }

    /// `Σ_{n≥1} g(n)·x(n)` for `x ∈ W_f`.
    pub fn dual_action(&self, g: &L1Seq, x: &CSeq) -> Result<Rational> {
        self.check_dual_hypotheses()?;
        if !self.member(x) {
            return Err(Error::hypothesis("dual action evaluated at a point outside W_f"));
        }
        Ok(g.pair_coords(x))
    }

    /// `e*(n) = −f(n+1)/f(1)`, the functional acting on `W_f` as `lim`.
    pub fn wstar_limit(&self) -> Result<L1Seq> {
        let h = self.head();
        if h.abs() < rat(1, 2) {
            return Err(Error::hypothesis("e* needs |f(1)| ≥ 1/2"));
        }
        Ok(self.f.shift_left(1).scale(&(-h.recip())))
    }

    /// The isometric copy of `c` inside `W_f`.
    pub fn embed_c(&self) -> Result<CEmbedding> {
        if !self.classify().contains_c.is_true() {
            return Err(Error::hypothesis("W_f contains no isometric copy of c (contains_c = false)"));
        }
        let SignSet::Finite(agree) = self.f.sign_set(SignPredicate::AgreesWithHead) else {
            unreachable!("contains_c implies a finite agreement set")
        };
        Ok(CEmbedding { w: self.clone(), agree })
    }

    /// A unit-ball point of `W_f` almost norming a finitely supported `g`.
    pub fn norming_vector(&self, g: &L1Seq, eps: &Rational) -> Result<CSeq> {
        self.norming_impl(g, eps, None)
    }

    /// As [`norming_vector`](Self::norming_vector), preferring the limit
    /// closest to `target` (scanning further free coordinates to reach it).
    pub fn norming_vector_with_limit(&self, g: &L1Seq, eps: &Rational, target: &Rational) -> Result<CSeq> {
        self.norming_impl(g, eps, Some(target))
    }

    fn norming_impl(&self, g: &L1Seq, eps: &Rational, target: Option<&Rational>) -> Result<CSeq> {
        self.check_dual_hypotheses()?;
        if !eps.is_positive() {
            return Err(Error::hypothesis("ε must be positive"));
        }
        let gnorm = g.l1_norm();
        if gnorm.is_zero() {
            return Err(Error::hypothesis("cannot norm the zero functional"));
        }
        if !g.is_finitely_supported() {
            return Err(Error::hypothesis("norming vectors need a finitely supported functional"));
        }
        let support: BTreeSet<usize> = g.finite().keys().copied().collect();
        let last = *support.iter().next_back().unwrap();

        // Free coordinates: n ∉ supp g with f(n+1) ≠ 0, in increasing order.
        let cap = last + 64;
        let free: Vec<(usize, Rational)> = self
            .f
            .nonzero_entries()
            .filter(|(i, _)| *i >= 2)
            .map(|(i, v)| (i - 1, v))
            .take_while(|(n, _)| *n <= cap)
            .filter(|(n, _)| !support.contains(n))
            .collect();

        let t_full = Rational::one();
        let t_shrunk = Rational::one() - eps / (Rational::from_integer(2.into()) * &gnorm);
        for t in [t_full, t_shrunk] {
            if let Some((r_len, l)) = self.solve_limit(g, &support, &free, &t, target) {
                let x = self.assemble(g, &free[..r_len], &t, l);
                let gx = g.pair_coords(&x);
                if !self.member(&x) || x.sup_norm() > Rational::one() || gx <= &gnorm - eps {
                    return Err(Error::Check("norming vector failed its own verification".into()));
                }
                return Ok(x);
            }
        }
        Err(Error::hypothesis(format!(
            "correction budget insufficient to norm g within ε = {eps}"
        )))
    }

    /// Picks how many free coordinates to use and the limit value.
    fn solve_limit(
        &self,
        g: &L1Seq,
        support: &BTreeSet<usize>,
        free: &[(usize, Rational)],
        t: &Rational,
        target: Option<&Rational>,
    ) -> Option<(usize, Rational)> {
        let total = self.f.signed_sum();
        let on_support: Rational = support.iter().map(|&n| self.f.entry(n + 1)).sum();
        let c: Rational = g.finite().iter().map(|(&n, v)| self.f.entry(n + 1) * sgn(v)).sum::<Rational>() * t;
        let want = target.cloned().unwrap_or_else(Rational::zero);
        let mut best: Option<(usize, Rational)> = None;
        let mut alpha = total - on_support;
        let mut budget = Rational::zero();
        for m in 0..=free.len() {
            if m > 0 {
                alpha -= &free[m - 1].1;
                budget += free[m - 1].1.abs();
            }
            if let Some((lo, hi)) = feasible_limits(&alpha, &c, &budget) {
                let l = clamp(want.clone(), &lo, &hi);
                let hit = l == want;
                best = Some((m, l));
                if hit || target.is_none() {
                    break;
                }
            }
        }
        best
    }

    fn assemble(&self, g: &L1Seq, free: &[(usize, Rational)], t: &Rational, l: Rational) -> CSeq {
        let mut prefix: BTreeMap<usize, Rational> =
            g.finite().iter().map(|(&n, v)| (n, sgn(v) * t)).collect();
        // residual the free coordinates must absorb: f(x) = 0
        let mut probe = prefix.clone();
        for (n, _) in free {
            probe.insert(*n, Rational::zero());
        }
        let mut residual = -self.f.pair_c(&CSeq::from_entries(probe, l.clone()));
        let lo = -Rational::one();
        let hi = Rational::one();
        for (n, a) in free {
            let v = clamp(&residual / a, &lo, &hi);
            residual -= a * &v;
            prefix.insert(*n, v);
        }
        CSeq::from_entries(prefix, l)
    }
}

/// `{L ∈ [−1, 1] : |αL + c| ≤ budget}` as a closed interval.
fn feasible_limits(alpha: &Rational, c: &Rational, budget: &Rational) -> Option<(Rational, Rational)> {
    let one = Rational::one();
    if alpha.is_zero() {
        return (c.abs() <= *budget).then(|| (-one.clone(), one));
    }
    let a = (-budget - c) / alpha;
    let b = (budget - c) / alpha;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let lo = if lo < -one.clone() { -one.clone() } else { lo };
    let hi = if hi > one { one } else { hi };
    (lo <= hi).then_some((lo, hi))
}

/// The linear isometry `c → W_f`: `x(k)` at the `k`-th zero of `f(·+1)`,
/// `−sgn(f(1)f(i+1))·lim x` elsewhere.
#[derive(Clone, Debug)]
pub struct CEmbedding {
    w: WfSpace,
    /// `{n : f(1)f(n+1) > 0}`, finite by hypothesis.
    agree: BTreeSet<usize>,
}

impl CEmbedding {
    pub fn apply(&self, x: &CSeq) -> CSeq {
        let l = x.limit().clone();
        let mut prefix: BTreeMap<usize, Rational> = self.agree.iter().map(|&n| (n, -l.clone())).collect();
        let k_max = x.horizon();
        let zeros = self.w.f.sign_set_iter(SignPredicate::Zero);
        for (k, n) in (1..=k_max).zip(zeros) {
            prefix.insert(n, x.entry(k));
        }
        CSeq::from_entries(prefix, l)
    }

    /// Membership and norm preservation at `x`.
    pub fn check(&self, x: &CSeq) -> Result<CSeq> {
        let y = self.apply(x);
        if !self.w.member(&y) {
            return Err(Error::Check(format!("T(x) ∉ W_f for x = {x}")));
        }
        if y.sup_norm() != x.sup_norm() {
            return Err(Error::Check(format!("‖T(x)‖ ≠ ‖x‖ for x = {x}")));
        }
        Ok(y)
    }
}
