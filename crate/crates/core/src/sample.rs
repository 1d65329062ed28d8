//! Seeded generators for property checks.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hyperplane::WfSpace;
use crate::rational::{rat, Rational};
use crate::seq::CSeq;
use crate::witness::poly::Poly;
use crate::witness::{QuasiTail, SimplexPoint};

/// Seed used when neither a flag nor `FPP_LAB_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `FPP_LAB_SEED` if set and valid, else [`DEFAULT_SEED`].
pub fn default_seed() -> u64 {
    std::env::var("FPP_LAB_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// `p/q` with `|p| ≤ num`, `1 ≤ q ≤ den`.
pub fn rational(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// A convergent sequence with up to `len` explicit entries.
pub fn cseq(rng: &mut impl Rng, len: usize) -> CSeq {
    let limit = rational(rng, 9, 7);
    let n = rng.gen_range(0..=len);
    let entries: Vec<(usize, Rational)> = (0..n)
        .map(|_| (rng.gen_range(1..=len.max(1) * 2), rational(rng, 9, 7)))
        .collect();
    CSeq::from_entries(entries, limit)
}

/// A random point of `W_f`: a random sequence corrected along one
/// coordinate where `f(n+1) ≠ 0`.
pub fn point_in(w: &WfSpace, rng: &mut impl Rng, len: usize) -> CSeq {
    let x = cseq(rng, len);
    let resid = w.f().pair_c(&x);
    if resid.is_zero() {
        return x;
    }
    let candidates: Vec<(usize, Rational)> = w
        .f()
        .nonzero_entries()
        .filter(|(i, _)| *i >= 2)
        .take(4)
        .map(|(i, v)| (i - 1, v))
        .collect();
    let (n, a) = candidates[rng.gen_range(0..candidates.len())].clone();
    let mut prefix = x.prefix().clone();
    let cur = x.entry(n);
    prefix.insert(n, cur - resid / a);
    CSeq::from_entries(prefix, x.limit().clone())
}

/// A simplex point: `width` random nonnegative weights, optionally sharing
/// the mass with a halving tail.
pub fn simplex_point(rng: &mut impl Rng, width: usize, tails: bool) -> SimplexPoint {
    let weights: Vec<Rational> = (0..width.max(1)).map(|_| rat(rng.gen_range(0..=6), 1)).collect();
    let total: Rational = weights.iter().sum();
    let weights = if total.is_zero() {
        let mut w = vec![Rational::zero(); width.max(1)];
        let k = rng.gen_range(0..w.len());
        w[k] = Rational::one();
        w
    } else {
        weights.into_iter().map(|x| x / &total).collect()
    };
    if tails && rng.gen_bool(0.5) {
        // keep (1 − τ) on the head and τ on (τ/2, τ/4, …)
        let tau = rat(rng.gen_range(1..=3), 4);
        let keep = Rational::one() - &tau;
        let head: Vec<Rational> = weights.into_iter().map(|x| x * &keep).collect();
        let start = head.len() + 1;
        let tail = QuasiTail { start, poly: Poly::constant(tau * rat(1, 2)), ratio: rat(1, 2) };
        SimplexPoint::new(head, Some(tail)).expect("valid by construction")
    } else {
        SimplexPoint::finite(weights).expect("valid by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn samples_are_reproducible_and_valid() {
        let a: Vec<_> = (0..5).map(|_| 0).scan(rng(7), |r, _| Some(rational(r, 9, 9))).collect();
        let b: Vec<_> = (0..5).map(|_| 0).scan(rng(7), |r, _| Some(rational(r, 9, 9))).collect();
        assert_eq!(a, b);
        let mut r = rng(3);
        for (_, w) in fixtures::hyperplanes() {
            for _ in 0..20 {
                assert!(w.member(&point_in(&w, &mut r, 6)));
            }
        }
        for _ in 0..20 {
            assert_eq!(simplex_point(&mut r, 4, true).sum(), Rational::one());
        }
    }
}
