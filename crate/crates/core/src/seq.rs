//! Exact elements of `c` (convergent sequences) and `ℓ₁`, their norms and
//! the `c* = ℓ₁` pairing.
//!
//! Indices are 1-based. For a [`CSeq`] the "0th coordinate" is its limit.
//! An [`L1Seq`] is a finite sparse part plus geometric tails living on
//! pairwise disjoint arithmetic progressions, which is enough to write every
//! functional the toolkit manipulates in closed form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{lcm, pow, RatStr, Rational};

/// The arithmetic progression `{start + k·step : k ≥ 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Progression {
    pub start: usize,
    pub step: usize,
}

impl Progression {
    pub fn new(start: usize, step: usize) -> Result<Self> {
        if start == 0 || step == 0 {
            return Err(Error::Parse(format!(
                "progression needs start ≥ 1 and step ≥ 1, got {start}:{step}"
            )));
        }
        Ok(Progression { start, step })
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= self.start && (i - self.start) % self.step == 0
    }

    pub fn nth(&self, k: usize) -> usize {
        self.start + k * self.step
    }

    pub fn position(&self, i: usize) -> Option<usize> {
        self.contains(i).then(|| (i - self.start) / self.step)
    }

    /// Position of the first element that is `≥ i`.
    pub fn first_position_at_least(&self, i: usize) -> usize {
        if i <= self.start {
            0
        } else {
            (i - self.start).div_ceil(self.step)
        }
    }

    /// Intersection of two progressions, itself a progression (or empty).
    pub fn intersect(&self, other: &Progression) -> Option<Progression> {
        let g = num_integer::gcd(self.step, other.step);
        if self.start.abs_diff(other.start) % g != 0 {
            return None;
        }
        let step = lcm(self.step, other.step);
        let lo = self.start.max(other.start);
        let mut x = self.nth(self.first_position_at_least(lo));
        for _ in 0..(other.step / g) {
            if other.contains(x) {
                return Some(Progression { start: x, step });
            }
            x += self.step;
        }
        None
    }

    /// Parse `"start:step"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected start:step, got {s:?}"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().parse().map_err(|_| bad())?;
        Progression::new(a, b)
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.step)
    }
}

/// Entries `coef·ratio^k` at index `start + k·step`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeomTail {
    pub start: usize,
    pub step: usize,
    pub coef: Rational,
    pub ratio: Rational,
}

impl GeomTail {
    pub fn new(start: usize, step: usize, coef: Rational, ratio: Rational) -> Result<Self> {
        if start == 0 || step == 0 {
            return Err(Error::Parse("tail start and step must be ≥ 1".into()));
        }
        if coef.is_zero() {
            return Err(Error::Parse("tail coefficient must be nonzero".into()));
        }
        if ratio.is_zero() || ratio.abs() >= Rational::one() {
            return Err(Error::Parse(format!(
                "tail ratio must satisfy 0 < |r| < 1, got {ratio}"
            )));
        }
        Ok(GeomTail { start, step, coef, ratio })
    }

    pub fn support(&self) -> Progression {
        Progression { start: self.start, step: self.step }
    }

    pub fn term(&self, k: usize) -> Rational {
        &self.coef * pow(&self.ratio, k)
    }

    pub fn entry(&self, i: usize) -> Option<Rational> {
        self.support().position(i).map(|k| self.term(k))
    }

    /// Sign of the entry at `i` without computing it (0 off the support).
    pub fn entry_sign(&self, i: usize) -> i8 {
        match self.support().position(i) {
            None => 0,
            Some(k) => {
                let mut s: i8 = if self.coef.is_positive() { 1 } else { -1 };
                if self.ratio.is_negative() && k % 2 == 1 {
                    s = -s;
                }
                s
            }
        }
    }

    pub fn abs_mass(&self) -> Rational {
        self.coef.abs() / (Rational::one() - self.ratio.abs())
    }

    pub fn signed_sum(&self) -> Rational {
        &self.coef / (Rational::one() - &self.ratio)
    }

    /// Tail beginning at its `k`-th term.
    pub fn advance(&self, k: usize) -> GeomTail {
        GeomTail {
            start: self.start + k * self.step,
            step: self.step,
            coef: self.term(k),
            ratio: self.ratio.clone(),
        }
    }

    /// Splits off every term at an index `< i`; returns the split terms and
    /// the remaining tail.
    pub fn split_before(&self, i: usize) -> (Vec<(usize, Rational)>, GeomTail) {
        let k0 = self.support().first_position_at_least(i);
        let head = (0..k0).map(|k| (self.start + k * self.step, self.term(k))).collect();
        (head, self.advance(k0))
    }

    /// The same entries, restricted to the indices of `p`.
    pub fn restrict(&self, p: &Progression) -> Option<GeomTail> {
        let q = self.support().intersect(p)?;
        let k0 = (q.start - self.start) / self.step;
        Some(GeomTail {
            start: q.start,
            step: q.step,
            coef: self.term(k0),
            ratio: pow(&self.ratio, q.step / self.step),
        })
    }

    /// Rewrites the tail as `m` interleaved tails of step `m·step`.
    fn split_step(&self, m: usize) -> Vec<GeomTail> {
        let ratio = pow(&self.ratio, m);
        (0..m)
            .map(|j| GeomTail {
                start: self.start + j * self.step,
                step: self.step * m,
                coef: self.term(j),
                ratio: ratio.clone(),
            })
            .collect()
    }

    /// Sign pattern period: `step`, doubled for alternating tails.
    fn sign_period(&self) -> usize {
        if self.ratio.is_negative() {
            2 * self.step
        } else {
            self.step
        }
    }
}

/// Predicates on `f(n+1)`, `n ≥ 1`, for [`L1Seq::sign_set`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignPredicate {
    Positive,
    Negative,
    Zero,
    /// `f(1)·f(n+1) > 0`
    AgreesWithHead,
    /// `f(1)·f(n+1) ≤ 0`
    DisagreesWithHead,
}

impl SignPredicate {
    fn holds(self, head: i8, s: i8) -> bool {
        match self {
            SignPredicate::Positive => s > 0,
            SignPredicate::Negative => s < 0,
            SignPredicate::Zero => s == 0,
            SignPredicate::AgreesWithHead => head * s > 0,
            SignPredicate::DisagreesWithHead => head * s <= 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignSet {
    Finite(BTreeSet<usize>),
    Infinite,
}

impl SignSet {
    pub fn is_finite(&self) -> bool {
        matches!(self, SignSet::Finite(_))
    }
}

/// An element of `ℓ₁` with an exact finite description.
#[derive(Clone, Debug, Default)]
pub struct L1Seq {
    finite: BTreeMap<usize, Rational>,
    tails: Vec<GeomTail>,
}

impl L1Seq {
    /// Validating constructor: tails must be pairwise disjoint and avoid the
    /// finite keys. Zero finite entries are dropped.
    pub fn new(finite: BTreeMap<usize, Rational>, tails: Vec<GeomTail>) -> Result<Self> {
        if finite.contains_key(&0) {
            return Err(Error::Parse("indices are 1-based".into()));
        }
        for (a, t) in tails.iter().enumerate() {
            if let Some(k) = finite.keys().find(|&&k| t.support().contains(k)) {
                return Err(Error::Parse(format!(
                    "finite entry {k} overlaps tail {}",
                    t.support()
                )));
            }
            for u in &tails[a + 1..] {
                if t.support().intersect(&u.support()).is_some() {
                    return Err(Error::Parse(format!(
                        "tails {} and {} overlap",
                        t.support(),
                        u.support()
                    )));
                }
            }
        }
        let finite = finite.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(L1Seq { finite, tails })
    }

    pub fn zero() -> Self {
        L1Seq::default()
    }

    /// The standard basis vector `e*_i`.
    pub fn unit(i: usize) -> Self {
        assert!(i >= 1, "indices are 1-based");
        L1Seq::from_finite([(i, Rational::one())])
    }

    pub fn from_finite(entries: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut finite = BTreeMap::new();
        for (i, v) in entries {
            assert!(i >= 1, "indices are 1-based");
            *finite.entry(i).or_insert_with(Rational::zero) += v;
        }
        finite.retain(|_, v: &mut Rational| !v.is_zero());
        L1Seq { finite, tails: Vec::new() }
    }

    pub fn with_tail(finite: impl IntoIterator<Item = (usize, Rational)>, tail: GeomTail) -> Result<Self> {
        L1Seq::new(finite.into_iter().collect(), vec![tail])
    }

    pub fn finite(&self) -> &BTreeMap<usize, Rational> {
        &self.finite
    }

    pub fn tails(&self) -> &[GeomTail] {
        &self.tails
    }

    pub fn is_zero(&self) -> bool {
        self.finite.is_empty() && self.tails.is_empty()
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.tails.is_empty()
    }

    pub fn entry(&self, i: usize) -> Rational {
        if let Some(v) = self.finite.get(&i) {
            return v.clone();
        }
        self.tails
            .iter()
            .find_map(|t| t.entry(i))
            .unwrap_or_else(Rational::zero)
    }

    pub fn entry_sign(&self, i: usize) -> i8 {
        if let Some(v) = self.finite.get(&i) {
            return if v.is_positive() { 1 } else { -1 };
        }
        self.tails.iter().map(|t| t.entry_sign(i)).find(|&s| s != 0).unwrap_or(0)
    }

    pub fn l1_norm(&self) -> Rational {
        let fin: Rational = self.finite.values().map(|v| v.abs()).sum();
        fin + self.tails.iter().map(GeomTail::abs_mass).sum::<Rational>()
    }

    /// `Σ_i f(i)`.
    pub fn signed_sum(&self) -> Rational {
        let fin: Rational = self.finite.values().sum();
        fin + self.tails.iter().map(GeomTail::signed_sum).sum::<Rational>()
    }

    /// Largest index carrying a finite entry or a tail start (0 when zero).
    pub fn horizon(&self) -> usize {
        let f = self.finite.keys().next_back().copied().unwrap_or(0);
        self.tails.iter().map(|t| t.start).fold(f, usize::max)
    }

    /// Largest index in the support, or `None` for infinite support.
    pub fn max_support(&self) -> Option<usize> {
        if self.tails.is_empty() {
            Some(self.finite.keys().next_back().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn min_support(&self) -> Option<usize> {
        let f = self.finite.keys().next().copied();
        let t = self.tails.iter().map(|t| t.start).min();
        match (f, t) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn sign_period(&self) -> usize {
        self.tails.iter().map(GeomTail::sign_period).fold(1, lcm)
    }

    /// `sup_{i ≥ from} |f(i)|`, attained.
    pub fn max_abs_from(&self, from: usize) -> Rational {
        let mut best = Rational::zero();
        for (_, v) in self.finite.range(from..) {
            if v.abs() > best {
                best = v.abs();
            }
        }
        for t in &self.tails {
            let k0 = t.support().first_position_at_least(from);
            let v = t.term(k0).abs();
            if v > best {
                best = v;
            }
        }
        best
    }

    /// Nonzero entries in increasing index order (infinite when tails exist).
    pub fn nonzero_entries(&self) -> NonzeroEntries<'_> {
        NonzeroEntries {
            finite: self.finite.iter().peekable(),
            tails: self
                .tails
                .iter()
                .map(|t| (t.start, t.coef.clone(), t))
                .collect(),
        }
    }

    /// Decides whether `{n ≥ 1 : pred(f(n+1))}` is finite, listing it if so.
    ///
    /// Beyond the horizon the sign pattern of the entries is periodic, so one
    /// period past it decides infinitude exactly.
    pub fn sign_set(&self, pred: SignPredicate) -> SignSet {
        let head = self.entry_sign(1);
        let horizon = self.horizon().max(1);
        let period = self.sign_period();
        let infinite = (horizon + 1..=horizon + period).any(|i| pred.holds(head, self.entry_sign(i)));
        if infinite {
            return SignSet::Infinite;
        }
        SignSet::Finite(
            (2..=horizon)
                .filter(|&i| pred.holds(head, self.entry_sign(i)))
                .map(|i| i - 1)
                .collect(),
        )
    }

    /// The elements `n ≥ 1` of the sign set, in increasing order.
    pub fn sign_set_iter(&self, pred: SignPredicate) -> impl Iterator<Item = usize> + '_ {
        let head = self.entry_sign(1);
        (1..).filter(move |&n| pred.holds(head, self.entry_sign(n + 1)))
    }

    pub fn scale(&self, s: &Rational) -> L1Seq {
        if s.is_zero() {
            return L1Seq::zero();
        }
        L1Seq {
            finite: self.finite.iter().map(|(&i, v)| (i, v * s)).collect(),
            tails: self
                .tails
                .iter()
                .map(|t| GeomTail { coef: &t.coef * s, ..t.clone() })
                .collect(),
        }
    }

    pub fn neg(&self) -> L1Seq {
        self.scale(&-Rational::one())
    }

    /// Sum. Overlapping tails are merged when their ratios agree on the
    /// common support; otherwise the sum has no representation here.
    pub fn add(&self, other: &L1Seq) -> Result<L1Seq> {
        let mut finite = self.finite.clone();
        for (&i, v) in &other.finite {
            *finite.entry(i).or_insert_with(Rational::zero) += v;
        }
        let tails = self.tails.iter().chain(&other.tails).cloned().collect();
        L1Seq::normalized(finite, tails)
    }

    pub fn sub(&self, other: &L1Seq) -> Result<L1Seq> {
        self.add(&other.neg())
    }

    /// `Σ cᵢ·vᵢ`.
    pub fn combination<'a>(terms: impl IntoIterator<Item = (Rational, &'a L1Seq)>) -> Result<L1Seq> {
        let mut finite: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut tails = Vec::new();
        for (c, v) in terms {
            let v = v.scale(&c);
            for (i, x) in v.finite {
                *finite.entry(i).or_insert_with(Rational::zero) += x;
            }
            tails.extend(v.tails);
        }
        L1Seq::normalized(finite, tails)
    }

    /// `g(n) = f(n + s)`.
    pub fn shift_left(&self, s: usize) -> L1Seq {
        let finite = self.finite.range(s + 1..).map(|(&i, v)| (i - s, v.clone())).collect();
        let tails = self
            .tails
            .iter()
            .map(|t| {
                let k0 = t.support().first_position_at_least(s + 1);
                let mut u = t.advance(k0);
                u.start -= s;
                u
            })
            .collect();
        L1Seq { finite, tails }
    }

    /// `g(n) = f(n − s)` for `n > s`, zero before.
    pub fn shift_right(&self, s: usize) -> L1Seq {
        L1Seq {
            finite: self.finite.iter().map(|(&i, v)| (i + s, v.clone())).collect(),
            tails: self
                .tails
                .iter()
                .map(|t| GeomTail { start: t.start + s, ..t.clone() })
                .collect(),
        }
    }

    /// Entries with index in `lo..=hi`, everything else zeroed.
    pub fn truncate(&self, lo: usize, hi: usize) -> L1Seq {
        if lo > hi {
            return L1Seq::zero();
        }
        let mut entries: Vec<(usize, Rational)> =
            self.finite.range(lo..=hi).map(|(&i, v)| (i, v.clone())).collect();
        for t in &self.tails {
            let mut k = t.support().first_position_at_least(lo);
            let mut v = t.term(k);
            while t.start + k * t.step <= hi {
                entries.push((t.start + k * t.step, v.clone()));
                v *= &t.ratio;
                k += 1;
            }
        }
        L1Seq::from_finite(entries)
    }

    /// Entries on the index set `p`, zero elsewhere.
    pub fn restrict_progression(&self, p: &Progression) -> L1Seq {
        L1Seq {
            finite: self
                .finite
                .iter()
                .filter(|(&i, _)| p.contains(i))
                .map(|(&i, v)| (i, v.clone()))
                .collect(),
            tails: self.tails.iter().filter_map(|t| t.restrict(p)).collect(),
        }
    }

    /// Entries on the indices of `sub`, zero elsewhere.
    pub fn restrict_subsequence(&self, sub: &Subsequence) -> L1Seq {
        let mut out = match &sub.progression {
            Some(p) => self.restrict_progression(p),
            None => L1Seq::zero(),
        };
        for &i in &sub.head {
            let v = self.entry(i);
            if !v.is_zero() {
                out.finite.insert(i, v);
            }
        }
        out
    }

    /// `h(t) = f(p.start + (t−1)·p.step)` for `t ≥ 1`.
    pub fn sample_progression(&self, p: &Progression) -> L1Seq {
        let finite = self
            .finite
            .iter()
            .filter_map(|(&i, v)| p.position(i).map(|t| (t + 1, v.clone())))
            .collect();
        let tails = self
            .tails
            .iter()
            .filter_map(|t| {
                let r = t.restrict(p)?;
                Some(GeomTail {
                    start: p.position(r.start).unwrap() + 1,
                    step: r.step / p.step,
                    coef: r.coef,
                    ratio: r.ratio,
                })
            })
            .collect();
        L1Seq { finite, tails }
    }

    /// `Σ_{i ∈ p} f(i)`.
    pub fn sum_over(&self, p: &Progression) -> Rational {
        self.restrict_progression(p).signed_sum()
    }

    /// `Σ_{i ∈ p} |f(i)|`.
    pub fn abs_sum_over(&self, p: &Progression) -> Rational {
        self.restrict_progression(p).l1_norm()
    }

    /// The `c*` action `f(x) = f(1)·lim x + Σ_{n≥1} f(n+1)·x(n)`.
    pub fn pair_c(&self, x: &CSeq) -> Rational {
        // f(1)L + Σ f(n+1)x(n) = L·Σf + Σ_{n ∈ prefix} f(n+1)(x(n) − L)
        let l = x.limit();
        let mut acc = l * self.signed_sum();
        for (&n, v) in x.prefix() {
            let d = v - l;
            if !d.is_zero() {
                acc += self.entry(n + 1) * d;
            }
        }
        acc
    }

    /// The coordinate action `g(x) = Σ_{n≥1} g(n)·x(n)` (no limit term).
    pub fn pair_coords(&self, x: &CSeq) -> Rational {
        let l = x.limit();
        let mut acc = l * self.signed_sum();
        for (&n, v) in x.prefix() {
            let d = v - l;
            if !d.is_zero() {
                acc += self.entry(n) * d;
            }
        }
        acc
    }

    /// Index of a coordinate where `self` and `other` have strictly opposite
    /// signs, if any.
    pub fn sign_conflict(&self, other: &L1Seq) -> Option<usize> {
        let bound = self.horizon().max(other.horizon()) + lcm(self.sign_period(), other.sign_period());
        (1..=bound).find(|&i| self.entry_sign(i) * other.entry_sign(i) < 0)
    }

    /// Positive and negative supports (finitely supported sequences only).
    pub fn pos_neg_support(&self) -> Option<(BTreeSet<usize>, BTreeSet<usize>)> {
        if !self.tails.is_empty() {
            return None;
        }
        let pos = self.finite.iter().filter(|(_, v)| v.is_positive()).map(|(&i, _)| i).collect();
        let neg = self.finite.iter().filter(|(_, v)| v.is_negative()).map(|(&i, _)| i).collect();
        Some((pos, neg))
    }

    /// Builds a valid representation from arbitrary parts: merges tails that
    /// share support and splits off tail terms that collide with finite keys.
    fn normalized(mut finite: BTreeMap<usize, Rational>, tails: Vec<GeomTail>) -> Result<L1Seq> {
        let tails: Vec<GeomTail> = tails.into_iter().filter(|t| !t.coef.is_zero()).collect();
        let mut merged = Vec::new();
        for component in overlap_components(&tails) {
            if component.len() == 1 {
                merged.push(tails[component[0]].clone());
                continue;
            }
            let step = component.iter().map(|&c| tails[c].step).fold(1, lcm);
            let mut classes: BTreeMap<usize, Vec<GeomTail>> = BTreeMap::new();
            for &c in &component {
                for piece in tails[c].split_step(step / tails[c].step) {
                    classes.entry(piece.start % step).or_default().push(piece);
                }
            }
            for (_, group) in classes {
                let start = group.iter().map(|t| t.start).max().unwrap();
                let mut coef = Rational::zero();
                let ratio = group[0].ratio.clone();
                for t in group {
                    if t.ratio != ratio {
                        return Err(Error::repr(format!(
                            "tails with ratios {} and {} share the support {}",
                            ratio, t.ratio, t.support()
                        )));
                    }
                    let (head, rest) = t.split_before(start);
                    for (i, v) in head {
                        *finite.entry(i).or_insert_with(Rational::zero) += v;
                    }
                    coef += rest.coef;
                }
                if !coef.is_zero() {
                    merged.push(GeomTail { start, step, coef, ratio });
                }
            }
        }
        let mut out_tails = Vec::with_capacity(merged.len());
        for t in merged {
            let last_hit = finite.keys().rev().find(|&&k| t.support().contains(k)).copied();
            match last_hit {
                Some(k) => {
                    let (head, rest) = t.split_before(k + 1);
                    for (i, v) in head {
                        *finite.entry(i).or_insert_with(Rational::zero) += v;
                    }
                    out_tails.push(rest);
                }
                None => out_tails.push(t),
            }
        }
        out_tails.sort_by_key(|t| (t.start, t.step));
        finite.retain(|_, v| !v.is_zero());
        Ok(L1Seq { finite, tails: out_tails })
    }
}

fn overlap_components(tails: &[GeomTail]) -> Vec<Vec<usize>> {
    let n = tails.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for a in 0..n {
        for b in a + 1..n {
            if tails[a].support().intersect(&tails[b].support()).is_some() {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Semantic equality: same sequence, whatever the representation.
impl PartialEq for L1Seq {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl fmt::Display for L1Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

pub struct NonzeroEntries<'a> {
    finite: std::iter::Peekable<std::collections::btree_map::Iter<'a, usize, Rational>>,
    tails: Vec<(usize, Rational, &'a GeomTail)>,
}

impl Iterator for NonzeroEntries<'_> {
    type Item = (usize, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        let next_tail = self.tails.iter().enumerate().min_by_key(|(_, (i, _, _))| *i).map(|(k, (i, _, _))| (k, *i));
        let next_fin = self.finite.peek().map(|(&i, _)| i);
        match (next_fin, next_tail) {
            (Some(fi), Some((_, ti))) if fi < ti => self.finite.next().map(|(&i, v)| (i, v.clone())),
            (Some(_), None) => self.finite.next().map(|(&i, v)| (i, v.clone())),
            (_, Some((k, _))) => {
                let (i, v, t) = &mut self.tails[k];
                let out = (*i, v.clone());
                *i += t.step;
                *v *= &t.ratio;
                Some(out)
            }
            (None, None) => None,
        }
    }
}

/// An element of `c`: finitely many explicit entries, then constant.
#[derive(Clone, Debug, Default)]
pub struct CSeq {
    prefix: BTreeMap<usize, Rational>,
    limit: Rational,
}

impl CSeq {
    pub fn new(prefix: BTreeMap<usize, Rational>, limit: Rational) -> Result<Self> {
        if prefix.contains_key(&0) {
            return Err(Error::Parse("indices are 1-based; the limit is the 0th coordinate".into()));
        }
        Ok(CSeq { prefix, limit })
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Rational)>, limit: Rational) -> Self {
        let prefix: BTreeMap<usize, Rational> = entries.into_iter().collect();
        assert!(!prefix.contains_key(&0), "indices are 1-based");
        CSeq { prefix, limit }
    }

    pub fn constant(limit: Rational) -> Self {
        CSeq { prefix: BTreeMap::new(), limit }
    }

    pub fn zero() -> Self {
        CSeq::default()
    }

    /// `e₀ = (1, 1, …)`.
    pub fn ones() -> Self {
        CSeq::constant(Rational::one())
    }

    pub fn prefix(&self) -> &BTreeMap<usize, Rational> {
        &self.prefix
    }

    pub fn limit(&self) -> &Rational {
        &self.limit
    }

    pub fn entry(&self, i: usize) -> Rational {
        self.prefix.get(&i).cloned().unwrap_or_else(|| self.limit.clone())
    }

    /// Largest explicit index (0 when the prefix is empty).
    pub fn horizon(&self) -> usize {
        self.prefix.keys().next_back().copied().unwrap_or(0)
    }

    pub fn sup_norm(&self) -> Rational {
        self.prefix
            .values()
            .map(|v| v.abs())
            .fold(self.limit.abs(), |a, b| if b > a { b } else { a })
    }

    /// Same sequence with entries equal to the limit dropped.
    pub fn canonical(&self) -> CSeq {
        CSeq {
            prefix: self
                .prefix
                .iter()
                .filter(|(_, v)| **v != self.limit)
                .map(|(&i, v)| (i, v.clone()))
                .collect(),
            limit: self.limit.clone(),
        }
    }

    fn zip_with(&self, other: &CSeq, op: impl Fn(&Rational, &Rational) -> Rational) -> CSeq {
        let keys: BTreeSet<usize> = self.prefix.keys().chain(other.prefix.keys()).copied().collect();
        CSeq {
            prefix: keys.into_iter().map(|i| (i, op(&self.entry(i), &other.entry(i)))).collect(),
            limit: op(&self.limit, &other.limit),
        }
    }

    pub fn add(&self, other: &CSeq) -> CSeq {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CSeq) -> CSeq {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Rational) -> CSeq {
        CSeq {
            prefix: self.prefix.iter().map(|(&i, v)| (i, v * s)).collect(),
            limit: &self.limit * s,
        }
    }

    /// Indices `lo..=hi` kept, the rest replaced by the limit.
    pub fn truncate(&self, hi: usize) -> CSeq {
        CSeq {
            prefix: self.prefix.range(..=hi).map(|(&i, v)| (i, v.clone())).collect(),
            limit: self.limit.clone(),
        }
    }
}

impl PartialEq for CSeq {
    fn eq(&self, other: &Self) -> bool {
        self.limit == other.limit
            && self
                .prefix
                .keys()
                .chain(other.prefix.keys())
                .all(|&i| self.entry(i) == other.entry(i))
    }
}

impl Eq for CSeq {}

impl fmt::Display for CSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

/// A strictly increasing index sequence: an explicit head, optionally
/// continued by an arithmetic progression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsequence {
    #[serde(default)]
    pub head: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub progression: Option<Progression>,
}

impl Subsequence {
    pub fn new(head: Vec<usize>, progression: Option<Progression>) -> Result<Self> {
        if head.first() == Some(&0) || head.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("subsequence must be strictly increasing and 1-based".into()));
        }
        if let (Some(&last), Some(p)) = (head.last(), progression) {
            if p.start <= last {
                return Err(Error::Parse("progression must start after the explicit head".into()));
            }
        }
        Ok(Subsequence { head, progression })
    }

    pub fn finite(head: Vec<usize>) -> Result<Self> {
        Subsequence::new(head, None)
    }

    pub fn progression(p: Progression) -> Self {
        Subsequence { head: Vec::new(), progression: Some(p) }
    }

    pub fn is_finite(&self) -> bool {
        self.progression.is_none()
    }

    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.head.len())
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_empty() && self.progression.is_none()
    }

    /// 0-based element access.
    pub fn nth(&self, k: usize) -> Option<usize> {
        if k < self.head.len() {
            return Some(self.head[k]);
        }
        self.progression.map(|p| p.nth(k - self.head.len()))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let tail = self.progression.into_iter().flat_map(|p| (0..).map(move |k| p.nth(k)));
        self.head.iter().copied().chain(tail)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.head.contains(&i) || self.progression.is_some_and(|p| p.contains(i))
    }

    /// The subsequence with its first `k` elements removed.
    pub fn skip(&self, k: usize) -> Subsequence {
        if k <= self.head.len() {
            return Subsequence { head: self.head[k..].to_vec(), progression: self.progression };
        }
        let p = self.progression.expect("skip past the end of a finite subsequence");
        let j = k - self.head.len();
        Subsequence { head: Vec::new(), progression: Some(Progression { start: p.nth(j), step: p.step }) }
    }

    /// The first `k` elements as a finite subsequence.
    pub fn take(&self, k: usize) -> Subsequence {
        Subsequence { head: self.iter().take(k).collect(), progression: None }
    }

    /// Parse `"2,3,4"`, `"1,3:2"` (head then progression `start:step`), or `"2:1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut head = Vec::new();
        let mut progression = None;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if progression.is_some() {
                return Err(Error::Parse("the progression part must come last".into()));
            }
            if part.contains(':') {
                progression = Some(Progression::parse(part)?);
            } else {
                head.push(part.parse().map_err(|_| Error::Parse(format!("bad index {part:?}")))?);
            }
        }
        Subsequence::new(head, progression)
    }
}

// ---------------------------------------------------------------------------
// JSON wire format

#[derive(Serialize, Deserialize)]
struct TailWire {
    start: usize,
    step: usize,
    coef: RatStr,
    ratio: RatStr,
}

#[derive(Serialize, Deserialize)]
struct L1Wire {
    #[serde(default)]
    finite: BTreeMap<usize, RatStr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tails: Vec<TailWire>,
}

#[derive(Serialize, Deserialize)]
struct CWire {
    #[serde(default)]
    prefix: BTreeMap<usize, RatStr>,
    limit: RatStr,
}

impl Serialize for L1Seq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        L1Wire {
            finite: self.finite.iter().map(|(&i, v)| (i, RatStr(v.clone()))).collect(),
            tails: self
                .tails
                .iter()
                .map(|t| TailWire {
                    start: t.start,
                    step: t.step,
                    coef: RatStr(t.coef.clone()),
                    ratio: RatStr(t.ratio.clone()),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for L1Seq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = L1Wire::deserialize(d)?;
        let tails = w
            .tails
            .into_iter()
            .map(|t| GeomTail::new(t.start, t.step, t.coef.0, t.ratio.0))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        L1Seq::new(w.finite.into_iter().map(|(i, v)| (i, v.0)).collect(), tails).map_err(D::Error::custom)
    }
}

impl Serialize for CSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CWire {
            prefix: self.prefix.iter().map(|(&i, v)| (i, RatStr(v.clone()))).collect(),
            limit: RatStr(self.limit.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = CWire::deserialize(d)?;
        CSeq::new(w.prefix.into_iter().map(|(i, v)| (i, v.0)).collect(), w.limit.0).map_err(D::Error::custom)
    }
}
