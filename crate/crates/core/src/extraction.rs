//! From a normalized, sign-coherent sequence of functionals to a subsequence
//! of the unit basis converging to a norm-one limit with nonnegative
//! selected coordinates, and back to a bad hyperplane.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::batch::{self, Mode};
use crate::error::{Error, Result};
use crate::hyperplane::{Classification, WfSpace};
use crate::rational::{int, inv_pow2, pow, rat, RatStr, Rational};
use crate::seq::{CSeq, L1Seq, SignPredicate, SignSet, Subsequence};

/// Default depth for the nested support sets.
pub const DEFAULT_DEPTH: usize = 16;

/// Finitely many functionals `x*_1, …, x*_N`, an optional limit `x*_0`, and
/// optionally the hyperplane `W_f` they act on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionalFamily {
    pub members: Vec<L1Seq>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_hint: Option<L1Seq>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predual: Option<L1Seq>,
}

impl FunctionalFamily {
    /// `x*_0` (when given) followed by the members.
    fn all(&self) -> Vec<&L1Seq> {
        self.limit_hint.iter().chain(self.members.iter()).collect()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FamilyReport {
    pub norms_one: bool,
    pub pairwise_sum_two: bool,
    pub sign_agreement: bool,
    /// `Σ_{i ≤ h} |x*_N(i)|` with `h` the horizon of `x*_1`: small when the
    /// family tends to zero coordinatewise.
    pub late_mass_on_early_coordinates: Option<RatStr>,
    /// `min_{n<N} ‖x*_n − x*_N‖`, a finite lower-bound check on the distance
    /// of late members from the convex hull (partial validation only).
    pub min_distance_to_last: Option<RatStr>,
    pub failures: Vec<String>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn validate_family(fam: &FunctionalFamily) -> FamilyReport {
    let all = fam.all();
    let offset = usize::from(fam.limit_hint.is_none());
    let label = |i: usize| format!("x*_{}", i + offset);
    let mut r = FamilyReport { norms_one: true, pairwise_sum_two: true, sign_agreement: true, ..Default::default() };
    for (i, x) in all.iter().enumerate() {
        let n = x.l1_norm();
        if !n.is_one() {
            r.norms_one = false;
            r.failures.push(format!("‖{}‖ = {n} ≠ 1", label(i)));
        }
    }
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            match all[i].add(all[j]) {
                Ok(s) if s.l1_norm() == int(2) => {}
                Ok(s) => {
                    r.pairwise_sum_two = false;
                    r.failures.push(format!("‖{} + {}‖ = {} ≠ 2", label(i), label(j), s.l1_norm()));
                }
                Err(e) => {
                    r.pairwise_sum_two = false;
                    r.failures.push(format!("{} + {}: {e}", label(i), label(j)));
                }
            }
            if let Some(k) = all[i].sign_conflict(all[j]) {
                r.sign_agreement = false;
                r.failures.push(format!("{} and {} disagree in sign at {k}", label(i), label(j)));
            }
        }
    }
    if let (Some(first), Some(last)) = (fam.members.first(), fam.members.last()) {
        let h = first.horizon();
        r.late_mass_on_early_coordinates = Some(RatStr(last.truncate(1, h).l1_norm()));
        let d = fam.members[..fam.members.len() - 1]
            .iter()
            .filter_map(|x| x.sub(last).ok().map(|d| d.l1_norm()))
            .min();
        r.min_distance_to_last = d.map(RatStr);
    }
    r
}

/// A selected member restricted to `lo..=hi`.
#[derive(Clone, Debug, Serialize)]
pub struct Block {
    /// 1-based position in the family.
    pub member: usize,
    pub lo: usize,
    pub hi: usize,
    pub mass: RatStr,
}

/// Greedy choice of `(n_k, m_k)` with `Σ_{m_{k−1} < i ≤ m_k} |x*_{n_k}(i)| > 1 − 2^{−k}`.
pub fn select_blocks(fam: &FunctionalFamily) -> Result<Vec<Block>> {
    let mut blocks = Vec::new();
    let mut prev = 0usize;
    let mut idx = 0usize;
    while idx < fam.members.len() {
        let k = blocks.len() + 1;
        let threshold = Rational::one() - inv_pow2(k);
        let mut chosen = None;
        while idx < fam.members.len() {
            let x = &fam.members[idx];
            idx += 1;
            if let Some(b) = admissible_block(x, prev, &threshold) {
                chosen = Some((idx, b));
                break;
            }
        }
        match chosen {
            Some((member, (hi, mass))) => {
                blocks.push(Block { member, lo: prev + 1, hi, mass: RatStr(mass) });
                prev = hi;
            }
            None => {
                return Err(Error::hypothesis(format!(
                    "block selection exhausted: no remaining member has mass > 1 − 2^-{k} beyond index {prev}"
                )))
            }
        }
    }
    if blocks.is_empty() {
        return Err(Error::hypothesis("block selection needs a nonempty family"));
    }
    Ok(blocks)
}

/// Smallest admissible right end, widened to cover a finite support.
fn admissible_block(x: &L1Seq, prev: usize, threshold: &Rational) -> Option<(usize, Rational)> {
    let available = x.l1_norm() - x.truncate(1, prev).l1_norm();
    if available <= *threshold {
        return None;
    }
    let mut mass = Rational::zero();
    let mut end = None;
    for (i, v) in x.nonzero_entries().skip_while(|(i, _)| *i <= prev) {
        mass += v.abs();
        if mass > *threshold {
            end = Some(i);
            break;
        }
    }
    let end = end?;
    let hi = match x.max_support() {
        Some(m) if m > end => m,
        _ => end,
    };
    let mass = x.truncate(prev + 1, hi).l1_norm();
    Some((hi, mass))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrindCase {
    /// `s₀⁺ > 0`, `s₀⁻ < 0`
    Mixed,
    /// `s₀⁻ = 0`
    PositiveOnly,
    /// `s₀⁺ = 0`: negative parts, flipped
    NegativeFlipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrindResult {
    pub blocks: Vec<Block>,
    pub y: Vec<L1Seq>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y0: Option<L1Seq>,
    #[serde(with = "crate::rational::serde_rat")]
    pub s_plus: Rational,
    #[serde(with = "crate::rational::serde_rat")]
    pub s_minus: Rational,
    pub case: GrindCase,
}

/// `(s⁺(g), s⁻(g))` of a finitely supported functional.
fn split_masses(g: &L1Seq) -> (Rational, Rational) {
    let mut p = Rational::zero();
    let mut n = Rational::zero();
    for v in g.finite().values() {
        if v.is_positive() {
            p += v;
        } else {
            n += v;
        }
    }
    (p, n)
}

fn part(g: &L1Seq, positive: bool) -> L1Seq {
    L1Seq::from_finite(g.finite().iter().filter(|(_, v)| v.is_positive() == positive).map(|(&i, v)| (i, v.clone())))
}

/// Restricts, normalizes and rescales the selected members so that every
/// block has the same positive and negative masses.
pub fn grind(fam: &FunctionalFamily, targets: Option<(Rational, Rational)>) -> Result<GrindResult> {
    let blocks = select_blocks(fam)?;
    let hats: Vec<L1Seq> = blocks
        .iter()
        .map(|b| {
            let t = fam.members[b.member - 1].truncate(b.lo, b.hi);
            let n = t.l1_norm();
            t.scale(&n.recip())
        })
        .collect();
    let (sp, sm) = match targets {
        Some((p, m)) => (p, m),
        None => split_masses(hats.last().unwrap()),
    };
    if sp.is_negative() || sp > Rational::one() || sm.is_positive() || sm < -Rational::one() || &sp - &sm != Rational::one() {
        return Err(Error::hypothesis(format!(
            "targets must satisfy s⁺ ∈ [0,1], s⁻ ∈ [−1,0], s⁺ − s⁻ = 1; got ({sp}, {sm})"
        )));
    }
    let case = if sp.is_zero() {
        GrindCase::NegativeFlipped
    } else if sm.is_zero() {
        GrindCase::PositiveOnly
    } else {
        GrindCase::Mixed
    };
    let mut y = Vec::with_capacity(hats.len());
    for (k, h) in hats.iter().enumerate() {
        let (hp, hm) = split_masses(h);
        let mismatch = |what: &str| {
            Error::hypothesis(format!(
                "grind case mismatch at block {}: {what} while targets are ({sp}, {sm})",
                k + 1
            ))
        };
        let yk = match case {
            GrindCase::Mixed => {
                if hp.is_zero() {
                    return Err(mismatch("s⁺ = 0"));
                }
                if hm.is_zero() {
                    return Err(mismatch("s⁻ = 0"));
                }
                part(h, true).scale(&(&sp / &hp)).add(&part(h, false).scale(&(&sm / &hm)))?
            }
            GrindCase::PositiveOnly => {
                if hp.is_zero() {
                    return Err(mismatch("s⁺ = 0"));
                }
                part(h, true).scale(&(&sp / &hp))
            }
            GrindCase::NegativeFlipped => {
                if hm.is_zero() {
                    return Err(mismatch("s⁻ = 0"));
                }
                part(h, false).scale(&(-(&sm / &hm)))
            }
        };
        y.push(yk);
    }
    let y0 = fam.limit_hint.as_ref().map(|x0| match case {
        GrindCase::NegativeFlipped => x0.neg(),
        _ => x0.clone(),
    });
    let (s_plus, s_minus) = match case {
        GrindCase::NegativeFlipped => (Rational::one(), Rational::zero()),
        _ => (sp, sm),
    };
    let out = GrindResult { blocks, y, y0, s_plus, s_minus, case };
    check_grind(&out)?;
    Ok(out)
}

/// Invariants of a ground sequence: unit norms, finite increasing supports,
/// sign coherence, constant masses, `s⁺ − s⁻ = 1`.
pub fn check_grind(g: &GrindResult) -> Result<()> {
    let fail = |m: String| Err(Error::Check(m));
    for (k, y) in g.y.iter().enumerate() {
        if !y.l1_norm().is_one() {
            return fail(format!("‖y*_{}‖ ≠ 1", k + 1));
        }
        if !y.is_finitely_supported() || y.is_zero() {
            return fail(format!("y*_{} is not finitely supported", k + 1));
        }
        if split_masses(y) != (g.s_plus.clone(), g.s_minus.clone()) {
            return fail(format!("masses of y*_{} differ from (s⁺, s⁻)", k + 1));
        }
    }
    for w in g.y.windows(2) {
        if w[0].max_support() >= w[1].min_support() {
            return fail("supports of consecutive y* overlap or are out of order".into());
        }
    }
    let all: Vec<&L1Seq> = g.y0.iter().chain(g.y.iter()).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if let Some(c) = all[i].sign_conflict(all[j]) {
                return fail(format!("sign conflict at coordinate {c}"));
            }
        }
    }
    if &g.s_plus - &g.s_minus != Rational::one() || !g.s_plus.is_positive() {
        return fail("s⁺ − s⁻ ≠ 1 or s⁺ ≤ 0".into());
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Norming {
    pub xs: Vec<CSeq>,
    /// Retained blocks (1-based), the same for every `m`.
    pub retained: Vec<usize>,
    /// `1 − s⁺/8^m`
    pub thresholds: Vec<RatStr>,
}

/// Unit-ball points `x_m ∈ W_f` with `y*_k(x_m) > 1 − s⁺/8^m` for every
/// retained block and limit as close to 1 as the hyperplane allows.
pub fn greedy_norming(w: &WfSpace, g: &GrindResult, depth: usize) -> Result<Norming> {
    let retained: Vec<usize> = (1..=g.y.len()).collect();
    let mut parts: Vec<&L1Seq> = g.y.iter().collect();
    if let Some(y0) = g.y0.as_ref().filter(|y0| y0.is_finitely_supported()) {
        parts.push(y0);
    }
    // sign-coherent, so one sign pattern norms every part at once
    let total = L1Seq::combination(parts.iter().map(|p| (Rational::one(), *p)))?;
    let count = int(parts.len() as i64);
    let mut xs = Vec::with_capacity(depth);
    let mut thresholds = Vec::with_capacity(depth);
    for m in 1..=depth {
        let slack = &g.s_plus / pow(&int(8), m);
        let threshold = Rational::one() - &slack;
        let x = w.norming_vector_with_limit(&total, &(&slack * &count), &Rational::one())?;
        for (k, y) in g.y.iter().enumerate() {
            let v = w.dual_action(y, &x)?;
            if v <= threshold {
                return Err(Error::Check(format!("y*_{}(x_{m}) = {v} does not exceed {threshold}", k + 1)));
            }
        }
        xs.push(x);
        thresholds.push(RatStr(threshold));
    }
    Ok(Norming { xs, retained, thresholds })
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportSets {
    pub depth: usize,
    /// `e[m−1][n−1] = E_m^{(n)}`
    pub e: Vec<Vec<BTreeSet<usize>>>,
    /// `f[m−1][n−1] = F_m^{(n)}`
    pub f: Vec<Vec<BTreeSet<usize>>>,
    /// `G^{(n)}` up to the depth
    pub g: Vec<BTreeSet<usize>>,
    /// `∪_n G^{(n)}`
    pub basis_indices: Vec<usize>,
    pub inequalities_checked: usize,
}

/// The nested sets of good coordinates and their mass inequalities.
pub fn support_sets(g: &GrindResult, norming: &Norming, depth: usize, mode: Mode) -> Result<SupportSets> {
    if depth > norming.xs.len() {
        return Err(Error::hypothesis(format!(
            "support sets to depth {depth} need that many norming vectors, have {}",
            norming.xs.len()
        )));
    }
    let sp = &g.s_plus;
    let cells: Vec<(usize, usize)> = (1..=depth).flat_map(|m| (1..=g.y.len()).map(move |n| (m, n))).collect();
    let computed = batch::try_map(mode, &cells, |&(m, n)| -> Result<BTreeSet<usize>> {
        let z = &g.y[n - 1];
        let x = &norming.xs[m - 1];
        let bar = Rational::one() - inv_pow2(m);
        let pos: Vec<(usize, &Rational)> = z.finite().iter().filter(|(_, v)| v.is_positive()).map(|(&i, v)| (i, v)).collect();
        let e: BTreeSet<usize> = pos.iter().filter(|(i, _)| x.entry(*i) > bar).map(|(i, _)| *i).collect();
        let inside: Rational = pos.iter().filter(|(i, _)| e.contains(i)).map(|(_, v)| (*v).clone()).sum();
        let outside: Rational = pos.iter().filter(|(i, _)| !e.contains(i)).map(|(_, v)| (*v).clone()).sum();
        let quarter = pow(&rat(1, 4), m);
        if inside < (Rational::one() - &quarter) * sp {
            return Err(Error::Check(format!("mass of E_{m}^({n}) below (1 − 4^-{m})s⁺")));
        }
        if outside > &quarter * sp {
            return Err(Error::Check(format!("mass outside E_{m}^({n}) exceeds s⁺/4^{m}")));
        }
        if e.is_empty() {
            return Err(Error::Check(format!("E_{m}^({n}) is empty")));
        }
        Ok(e)
    })?;
    let width = g.y.len();
    let e: Vec<Vec<BTreeSet<usize>>> = computed.chunks(width).map(|c| c.to_vec()).collect();
    let mut f: Vec<Vec<BTreeSet<usize>>> = Vec::with_capacity(depth);
    for m in 0..depth {
        let row: Vec<BTreeSet<usize>> = (0..width)
            .map(|n| if m == 0 { e[0][n].clone() } else { f[m - 1][n].intersection(&e[m][n]).copied().collect() })
            .collect();
        if let Some(n) = row.iter().position(BTreeSet::is_empty) {
            // the geometric masses forbid this: Σ_{j≤m} 4^{-j} s⁺ < s⁺
            return Err(Error::Check(format!("F_{}^({}) is empty", m + 1, n + 1)));
        }
        f.push(row);
    }
    let g_sets = f.last().cloned().unwrap_or_else(|| vec![BTreeSet::new(); width]);
    let basis_indices: Vec<usize> = g_sets.iter().flatten().copied().collect();
    Ok(SupportSets { depth, e, f, g: g_sets, basis_indices, inequalities_checked: 2 * cells.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct FinalCertificate {
    pub e_star: L1Seq,
    pub n_k: Vec<usize>,
    #[serde(with = "crate::rational::serde_rat")]
    pub e_star_norm: Rational,
    pub selected_values: Vec<RatStr>,
    pub pairs_checked: usize,
    pub citation: &'static str,
}

/// The closing estimates: `e*_{n_k}(x_m) > 1 − ε_m`, `e*(x_m) ≥ 1 − ε_m`,
/// `‖e*‖ = 1` and `e*(n_k) ≥ 0`, with `ε_m = 2^{−m}`.
pub fn final_step_check(w: &WfSpace, basis_indices: &[usize], xs: &[CSeq]) -> Result<FinalCertificate> {
    let e_star = w.wstar_limit()?;
    let norm = e_star.l1_norm();
    if !norm.is_one() {
        return Err(Error::hypothesis(format!(
            "W_f is not in the bad regime: ‖e*‖ = {norm} ≠ 1"
        )));
    }
    let mut pairs = 0;
    for (m0, x) in xs.iter().enumerate() {
        let m = m0 + 1;
        let bar = Rational::one() - inv_pow2(m);
        for &n in basis_indices {
            let v = w.dual_action(&L1Seq::unit(n), x)?;
            if v <= bar {
                return Err(Error::Check(format!("e*_{n}(x_{m}) = {v} ≤ 1 − 2^-{m}")));
            }
            pairs += 1;
        }
        let lim = w.dual_action(&e_star, x)?;
        if lim < bar {
            return Err(Error::Check(format!("e*(x_{m}) = {lim} < 1 − 2^-{m}")));
        }
    }
    let values: Vec<Rational> = basis_indices.iter().map(|&n| e_star.entry(n)).collect();
    if let Some((n, v)) = basis_indices.iter().zip(&values).find(|(_, v)| v.is_negative()) {
        return Err(Error::Check(format!("e*({n}) = {v} < 0")));
    }
    Ok(FinalCertificate {
        e_star,
        n_k: basis_indices.to_vec(),
        e_star_norm: norm,
        selected_values: values.into_iter().map(RatStr).collect(),
        pairs_checked: pairs,
        citation: "thm:basis-limit",
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BadWf {
    pub f: L1Seq,
    /// `Σ_{k≥2} e*(n_k)`
    #[serde(with = "crate::rational::serde_rat")]
    pub sigma: Rational,
    pub classification: Classification,
}

/// `f = (−1/2, (1−σ)/2, e*(n₂)/2, e*(n₃)/2, …)`.
pub fn bad_wf_from_basis_limit(e_star: &L1Seq, subseq: &Subsequence) -> Result<(WfSpace, BadWf)> {
    if !e_star.l1_norm().is_one() {
        return Err(Error::hypothesis("basis limit must have norm one"));
    }
    let selected = e_star.restrict_subsequence(subseq);
    if selected.finite().values().any(Signed::is_negative)
        || selected.tails().iter().any(|t| t.coef.is_negative() || t.ratio.is_negative())
    {
        return Err(Error::hypothesis("basis limit is negative at a selected index"));
    }
    let later = subseq.skip(1);
    let sigma = e_star.restrict_subsequence(&later).signed_sum();
    let half = rat(1, 2);
    let mut entries = vec![(1, -half.clone()), (2, (Rational::one() - &sigma) * &half)];
    for (j, &n) in later.head.iter().enumerate() {
        entries.push((j + 3, e_star.entry(n) * &half));
    }
    let mut f = L1Seq::from_finite(entries);
    if let Some(p) = later.progression {
        let sampled = e_star.sample_progression(&p).scale(&half);
        f = f.add(&sampled.shift_right(later.head.len() + 2))?;
    }
    let w = WfSpace::new(f.clone())?;
    let classification = w.classify();
    if sigma.is_zero() && !classification.iso_c {
        return Err(Error::Check("Σ e*(n_k) = 0 but W_f is not isometric to c".into()));
    }
    if sigma.is_positive() && !classification.is_bad {
        return Err(Error::Check("Σ e*(n_k) > 0 but W_f is not bad".into()));
    }
    Ok((w, BadWf { f, sigma, classification }))
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub u_star: L1Seq,
    #[serde(with = "crate::rational::serde_rat")]
    pub u_star_norm: Rational,
    /// `φ(e*)` on the first coordinates
    pub phi_e_star: Vec<RatStr>,
    /// `y*` on the same coordinates
    pub y_star: Vec<RatStr>,
    pub isometric_samples: usize,
}

/// The basis-to-basis map `x*_1 = u*/‖u*‖, x*_k = e*_{n_k} ↦ y*_k` sends
/// `e*` to the limit functional of the constructed hyperplane.
pub fn phi_basis_map_check(e_star: &L1Seq, subseq: &Subsequence, seed: u64) -> Result<PhiReport> {
    let later = subseq.skip(1);
    let removed = e_star.restrict_subsequence(&later);
    let u_star = e_star.sub(&removed)?;
    if u_star.is_zero() {
        return Err(Error::hypothesis("u* = 0; pass to a different subsequence"));
    }
    let u_norm = u_star.l1_norm();
    let sigma = removed.signed_sum();
    if u_norm != Rational::one() - &sigma {
        return Err(Error::Check(format!("‖u*‖ = {u_norm} ≠ 1 − Σ e*(n_k) = {}", Rational::one() - &sigma)));
    }
    let width = 1 + later.len().unwrap_or(8).min(8);
    // φ(e*) = ‖u*‖y*_1 + Σ_{k≥2} e*(n_k) y*_k
    let phi: Vec<Rational> = std::iter::once(u_norm.clone())
        .chain(later.iter().take(width - 1).map(|n| e_star.entry(n)))
        .collect();
    let (w, _) = bad_wf_from_basis_limit(e_star, subseq)?;
    let y_star = w.wstar_limit()?;
    let y: Vec<Rational> = (1..=width).map(|i| y_star.entry(i)).collect();
    if phi != y {
        return Err(Error::Check("φ(e*) ≠ y* coordinatewise".into()));
    }
    // (x*_k) is isometrically the unit basis on sampled combinations
    let x1 = u_star.scale(&u_norm.recip());
    let xs: Vec<L1Seq> = std::iter::once(x1).chain(later.iter().take(width - 1).map(L1Seq::unit)).collect();
    let mut rng = crate::sample::rng(seed);
    let samples = 64;
    for _ in 0..samples {
        let a: Vec<Rational> = (0..width).map(|_| crate::sample::rational(&mut rng, 5, 4)).collect();
        let v = L1Seq::combination(a.iter().cloned().zip(xs.iter()))?;
        let rhs: Rational = a.iter().map(|x| x.abs()).sum();
        if v.l1_norm() != rhs {
            return Err(Error::Check("basis (x*_k) is not isometric to the unit basis".into()));
        }
    }
    Ok(PhiReport {
        u_star,
        u_star_norm: u_norm,
        phi_e_star: phi.into_iter().map(RatStr).collect(),
        y_star: y.into_iter().map(RatStr).collect(),
        isometric_samples: samples,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportSummary {
    pub depth: usize,
    pub g: Vec<BTreeSet<usize>>,
    pub basis_indices: Vec<usize>,
    pub inequalities_checked: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineCertificate {
    pub family: FamilyReport,
    pub grind: GrindResult,
    pub norming_depth: usize,
    pub norming_limits: Vec<RatStr>,
    pub support: SupportSummary,
    pub final_step: FinalCertificate,
    pub round_trip: BadWf,
    pub phi: PhiReport,
}

/// Every stage in order, failing on the first violated check.
pub fn run_pipeline(
    fam: &FunctionalFamily,
    targets: Option<(Rational, Rational)>,
    depth: usize,
    mode: Mode,
    seed: u64,
) -> Result<PipelineCertificate> {
    let report = validate_family(fam);
    if !report.passed() {
        return Err(Error::hypothesis(format!("family validation failed: {}", report.failures.join("; "))));
    }
    let predual = fam
        .predual
        .clone()
        .ok_or_else(|| Error::hypothesis("the family names no driving hyperplane (\"predual\")"))?;
    let w = WfSpace::new(predual)?;
    let g = grind(fam, targets)?;
    let norming = greedy_norming(&w, &g, depth)?;
    let sets = support_sets(&g, &norming, depth, mode)?;
    let fin = final_step_check(&w, &sets.basis_indices, &norming.xs)?;
    let sub = Subsequence::finite(fin.n_k.clone())?;
    let (_, round_trip) = bad_wf_from_basis_limit(&fin.e_star, &sub)?;
    let phi = phi_basis_map_check(&fin.e_star, &sub, seed)?;
    Ok(PipelineCertificate {
        family: report,
        norming_depth: norming.xs.len(),
        norming_limits: norming.xs.iter().map(|x| RatStr(x.limit().clone())).collect(),
        support: SupportSummary {
            depth: sets.depth,
            g: sets.g,
            basis_indices: sets.basis_indices,
            inequalities_checked: sets.inequalities_checked,
        },
        grind: g,
        final_step: fin,
        round_trip,
        phi,
    })
}

/// `N⁺` of a hyperplane restricted to `[1, bound]`, used when a round trip
/// needs an explicit subsequence.
pub fn n_plus_upto(w: &WfSpace, bound: usize) -> Vec<usize> {
    match w.f().sign_set(SignPredicate::DisagreesWithHead) {
        SignSet::Finite(s) => s.into_iter().filter(|&n| n <= bound).collect(),
        SignSet::Infinite => w.f().sign_set_iter(SignPredicate::DisagreesWithHead).take_while(|&n| n <= bound).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn fam(members: Vec<L1Seq>) -> FunctionalFamily {
        FunctionalFamily { members, limit_hint: None, predual: None }
    }

    #[test]
    fn validation_examples() {
        assert!(validate_family(&fixtures::unit_family(10)).passed());
        assert!(validate_family(&fixtures::mixed_family(6)).passed());
        let clash = validate_family(&fam(vec![L1Seq::unit(1), L1Seq::unit(1).neg()]));
        assert!(!clash.pairwise_sum_two && !clash.sign_agreement);
    }

    #[test]
    fn block_examples() {
        let b = select_blocks(&fixtures::unit_family(4)).unwrap();
        assert_eq!(b.iter().map(|b| (b.lo, b.hi)).collect::<Vec<_>>(), vec![(1, 1), (2, 2), (3, 3), (4, 4)]);
        let b = select_blocks(&fixtures::mixed_family(3)).unwrap();
        assert_eq!(b.iter().map(|b| (b.lo, b.hi)).collect::<Vec<_>>(), vec![(1, 3), (4, 5), (6, 7)]);
        assert!(b.iter().all(|b| b.mass.0 == int(1)));
        let spread = fam(vec![L1Seq::unit(3), L1Seq::from_finite([(1, rat(1, 2)), (4, rat(1, 2))])]);
        assert!(select_blocks(&spread).is_err());
    }

    #[test]
    fn grind_examples() {
        let g = grind(&fixtures::unit_family(5), None).unwrap();
        assert_eq!(g.case, GrindCase::PositiveOnly);
        assert_eq!((g.s_plus.clone(), g.s_minus.clone()), (int(1), int(0)));
        assert_eq!(g.y[2], L1Seq::unit(3));

        let g = grind(&fixtures::mixed_family(4), None).unwrap();
        assert_eq!((g.s_plus.clone(), g.s_minus.clone()), (rat(3, 4), rat(-1, 4)));
        assert_eq!(g.y, fixtures::mixed_family(4).members);

        let neg = fam((1..=4).map(|n| L1Seq::unit(n).neg()).collect());
        let g = grind(&neg, Some((int(0), int(-1)))).unwrap();
        assert_eq!(g.case, GrindCase::NegativeFlipped);
        assert_eq!(g.y[1], L1Seq::unit(2));
        assert_eq!((g.s_plus, g.s_minus), (int(1), int(0)));

        // mixed targets demand a negative part the unit blocks lack
        assert!(grind(&fixtures::unit_family(3), Some((rat(3, 4), rat(-1, 4)))).is_err());
        assert!(grind(&fixtures::unit_family(3), Some((rat(3, 4), rat(-1, 2)))).is_err());
    }

    #[test]
    fn norming_and_sets() {
        let f = fixtures::mixed_family(4);
        let w = WfSpace::new(f.predual.clone().unwrap()).unwrap();
        let g = grind(&f, None).unwrap();
        assert!(greedy_norming(&w, &g, 0).unwrap().xs.is_empty());
        let n = greedy_norming(&w, &g, 3).unwrap();
        assert_eq!(n.xs[0].entry(2), int(1));
        assert_eq!(n.xs[0].entry(3), int(-1));
        let s = support_sets(&g, &n, 3, Mode::Sequential).unwrap();
        assert_eq!(s.basis_indices, vec![2, 4, 6, 8]);
        assert!(support_sets(&g, &n, 4, Mode::Sequential).is_err());
    }

    #[test]
    fn strict_boundary_excluded() {
        // x_1(i) = 1 − 1/2 exactly is not > 1 − 1/2
        let g = grind(&fixtures::unit_family(2), None).unwrap();
        let x = CSeq::from_entries([(1, int(1)), (2, rat(1, 2))], int(1));
        let n = Norming { xs: vec![x], retained: vec![1, 2], thresholds: vec![] };
        let e = support_sets(&g, &n, 1, Mode::Sequential).unwrap_err();
        assert!(e.to_string().contains("E_1^(2)"));
    }

    #[test]
    fn final_step_examples() {
        let w = fixtures::c_like();
        let x = CSeq::from_entries([(1, int(-1))], int(1));
        let c = final_step_check(&w, &[2, 3, 4], &[x]).unwrap();
        assert_eq!(c.e_star, L1Seq::from_finite([(1, int(-1))]));
        assert!(c.selected_values.iter().all(|v| v.0 == int(0)));
        assert_eq!(fixtures::example22().wstar_limit().unwrap().l1_norm(), int(1));
        let good = fixtures::f_eps(&rat(1, 2)).unwrap();
        let e = final_step_check(&good, &[2], &[]).unwrap_err();
        assert!(e.to_string().contains("1/2"));
    }

    #[test]
    fn bad_wf_examples() {
        let sub = Subsequence::finite(vec![2, 3, 4]).unwrap();
        let (w, r) = bad_wf_from_basis_limit(&L1Seq::unit(1), &sub).unwrap();
        assert_eq!(w.f(), &L1Seq::from_finite([(1, rat(-1, 2)), (2, rat(1, 2))]));
        assert!(r.classification.iso_c && r.sigma.is_zero());

        let e = L1Seq::from_finite([(1, rat(1, 2)), (2, rat(1, 2))]);
        let sub = Subsequence::finite(vec![1, 2]).unwrap();
        let (w, r) = bad_wf_from_basis_limit(&e, &sub).unwrap();
        assert_eq!(w.f(), &L1Seq::from_finite([(1, rat(-1, 2)), (2, rat(1, 4)), (3, rat(1, 4))]));
        assert!(r.classification.is_bad);

        let neg = L1Seq::from_finite([(1, rat(1, 2)), (2, rat(-1, 2))]);
        assert!(bad_wf_from_basis_limit(&neg, &sub).is_err());
    }

    #[test]
    fn bad_wf_over_progression() {
        let e = fixtures::geometric().wstar_limit().unwrap();
        let sub = Subsequence::progression(crate::seq::Progression::new(1, 1).unwrap());
        let (w, r) = bad_wf_from_basis_limit(&e, &sub).unwrap();
        assert_eq!(r.sigma, rat(1, 2));
        assert_eq!(w.f().entry(2), rat(1, 4));
        assert_eq!(w.f().entry(3), rat(1, 8));
        assert!(r.classification.is_bad);
    }

    #[test]
    fn phi_examples() {
        let e = L1Seq::from_finite([(1, rat(1, 2)), (2, rat(1, 2))]);
        let r = phi_basis_map_check(&e, &Subsequence::finite(vec![1, 2]).unwrap(), 1).unwrap();
        assert_eq!(r.u_star, L1Seq::from_finite([(1, rat(1, 2))]));
        assert_eq!(r.phi_e_star.iter().map(|x| x.0.clone()).collect::<Vec<_>>(), vec![rat(1, 2), rat(1, 2)]);
        let r = phi_basis_map_check(&L1Seq::unit(1), &Subsequence::finite(vec![2, 3]).unwrap(), 1).unwrap();
        assert_eq!(r.u_star, L1Seq::unit(1));
        let x = L1Seq::unit(1).sub(&L1Seq::unit(2)).unwrap();
        assert_eq!(x.l1_norm(), int(2));
    }

    #[test]
    fn pipelines_run() {
        for f in [fixtures::unit_family(6), fixtures::mixed_family(6)] {
            let c = run_pipeline(&f, None, 8, Mode::Sequential, 5).unwrap();
            assert_eq!(c.final_step.e_star_norm, int(1));
            assert_eq!(&c.grind.s_plus - &c.grind.s_minus, int(1));
        }
    }
}
