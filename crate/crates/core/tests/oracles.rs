//! Cross-checks of exact results against independent floating-point
//! truncations and hand-derived values.

use fpp_lab::quotientproj::{self, oracle, VanishingSubspace};
use fpp_lab::rational::{int, rat, to_f64};
use fpp_lab::seq::{CSeq, GeomTail, L1Seq, Progression, SignPredicate, SignSet};
use fpp_lab::witness::poly::Poly;
use fpp_lab::witness::QuasiTail;
use fpp_lab::{fixtures, sample, Rational};
use rand::Rng;

const TERMS: usize = 400;

fn floats(g: &L1Seq, n: usize) -> Vec<f64> {
    (1..=n).map(|i| to_f64(&g.entry(i))).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn limit_functional_by_truncated_sums() {
    let mut rng = sample::rng(101);
    for (name, w) in fixtures::hyperplanes() {
        let f = floats(w.f(), TERMS + 1);
        let e: Vec<f64> = (1..=TERMS).map(|n| -f[n] / f[0]).collect();
        let exact = w.wstar_limit().unwrap();
        for (n, v) in e.iter().enumerate().take(40) {
            assert!(close(to_f64(&exact.entry(n + 1)), *v, 1e-15), "{name} e*({})", n + 1);
        }
        let norm: f64 = e.iter().map(|x| x.abs()).sum();
        let a1 = f[0].abs();
        assert!(close(norm, (1.0 - a1) / a1, 1e-12), "{name}: ‖e*‖ ≈ {norm}");
        for _ in 0..20 {
            let x = sample::point_in(&w, &mut rng, 8);
            let xs: Vec<f64> = (1..=TERMS).map(|n| to_f64(&x.entry(n))).collect();
            let ex: f64 = e.iter().zip(&xs).map(|(a, b)| a * b).sum();
            assert!(close(ex, to_f64(x.limit()), 1e-9), "{name}: e*(x) ≈ {ex}");
        }
    }
}

#[test]
fn sign_sets_by_scanning() {
    for (name, w) in fixtures::hyperplanes() {
        let f = floats(w.f(), 301);
        let count = (1..=300).filter(|&n| f[0] * f[n] <= 0.0).count();
        match w.f().sign_set(SignPredicate::DisagreesWithHead) {
            SignSet::Infinite => assert!(count >= 100, "{name}: only {count} disagreements"),
            SignSet::Finite(s) => assert_eq!(s.len(), count, "{name}"),
        }
    }
}

#[test]
fn geometric_sums_by_truncation() {
    let mut rng = sample::rng(102);
    for _ in 0..200 {
        let start = rng.gen_range(2..6);
        let step = rng.gen_range(1..4);
        let num = rng.gen_range(-5..=5);
        let ratio = rat(num, 6);
        if num == 0 {
            continue;
        }
        let coef = rat(rng.gen_range(1..9), rng.gen_range(1..9));
        let tail = GeomTail::new(start, step, coef.clone(), ratio.clone()).unwrap();
        let g = L1Seq::with_tail([(1, rat(1, 3))], tail).unwrap();
        let terms = floats(&g, 600);
        let signed: f64 = terms.iter().sum();
        let abs: f64 = terms.iter().map(|x| x.abs()).sum();
        assert!(close(to_f64(&g.signed_sum()), signed, 1e-12));
        assert!(close(to_f64(&g.l1_norm()), abs, 1e-12));
        let p = Progression::new(rng.gen_range(1..5), rng.gen_range(1..5)).unwrap();
        let over: f64 = (1..=600).filter(|&i| p.contains(i)).map(|i| terms[i - 1]).sum();
        assert!(close(to_f64(&g.sum_over(&p)), over, 1e-12));
    }
}

#[test]
fn quasi_tail_sums_by_truncation() {
    let mut rng = sample::rng(103);
    for _ in 0..100 {
        let coeffs: Vec<Rational> = (0..rng.gen_range(1..4)).map(|_| rat(rng.gen_range(-4..=4), rng.gen_range(1..4))).collect();
        let ratio = rat(rng.gen_range(-3..=3), 4);
        let t = QuasiTail { start: 3, poly: Poly::new(coeffs), ratio };
        let sum: f64 = (3..2000).map(|i| to_f64(&t.coeff(i))).sum();
        let abs: f64 = (3..2000).map(|i| to_f64(&t.coeff(i)).abs()).sum();
        assert!(close(to_f64(&t.sum()), sum, 1e-9), "{t:?}");
        assert!(close(to_f64(&t.abs_sum()), abs, 1e-9), "{t:?}");
    }
}

/// A float lower bound from single annihilating functionals, and a float
/// upper bound `‖v − y‖` for an explicit `y ∈ Y` checked in floating point.
fn sandwich(y: &VanishingSubspace, v: &CSeq) -> (f64, f64) {
    let s = y.zero_indices();
    let a = floats(y.weights(), TERMS);
    let vs: Vec<f64> = (1..=TERMS).map(|n| to_f64(&v.entry(n))).collect();
    let l = to_f64(v.limit());
    let free: Vec<usize> = (1..=TERMS).filter(|&n| !s.contains(n)).collect();
    let mass: f64 = free.iter().map(|&n| a[n - 1].abs()).sum();
    let c: f64 = free.iter().map(|&n| a[n - 1] * vs[n - 1]).sum();
    let mut lower = l.abs();
    for n in (1..=TERMS).filter(|&n| s.contains(n)) {
        lower = lower.max(vs[n - 1].abs());
    }
    if mass > 0.0 {
        lower = lower.max(c.abs() / mass);
    }
    let w = quotientproj::quotient_witness(y, v, &rat(1, 1000)).unwrap();
    let ws: Vec<f64> = (1..=TERMS).map(|n| to_f64(&w.entry(n))).collect();
    assert!(ws.iter().enumerate().all(|(i, x)| !s.contains(i + 1) || *x == 0.0));
    assert!(to_f64(w.limit()) == 0.0);
    let fw: f64 = a.iter().zip(&ws).map(|(p, q)| p * q).sum();
    assert!(fw.abs() < 1e-9, "f(y) ≈ {fw}");
    let upper = vs.iter().zip(&ws).map(|(p, q)| (p - q).abs()).fold(l.abs(), f64::max);
    (lower, upper)
}

#[test]
fn quotient_norm_between_float_bounds() {
    let configs = [
        quotientproj::example31_subspace(),
        VanishingSubspace::new(fixtures::example22(), Progression::new(2, 2).unwrap()),
        VanishingSubspace::new(fixtures::geometric(), Progression::new(1, 3).unwrap()),
    ];
    let mut rng = sample::rng(104);
    for y in &configs {
        for _ in 0..40 {
            let v = sample::point_in(y.ambient(), &mut rng, 8);
            let q = to_f64(&quotientproj::quotient_norm(y, &v).unwrap().value);
            let (lo, hi) = sandwich(y, &v);
            assert!(q >= lo - 1e-9 && q <= hi + 1e-9 && hi <= q + 1e-3 + 1e-9, "{q} ∉ [{lo}, {hi}]");
        }
    }
}

#[test]
fn hand_derived_quotient_values() {
    // example22 modulo the evens: v = (7/3, 1, 1, …) has B = 1 and
    // c = −2/3 against free mass 1/3, so D = 2 dominates
    let y = VanishingSubspace::new(fixtures::example22(), Progression::new(2, 2).unwrap());
    let v = CSeq::from_entries([(1, rat(7, 3))], int(1));
    assert!(y.ambient().member(&v));
    let q = quotientproj::quotient_norm(&y, &v).unwrap();
    assert_eq!((q.b.clone(), q.value.clone()), (int(1), int(2)));
    for d in oracle::DEPTHS {
        assert_eq!(oracle::lp_quotient_norm(&y, &v, d).unwrap(), int(2));
    }
    // example31 modulo the evens: c = lim/2 against free mass 1/2, so D = |lim| ≤ B
    let y = quotientproj::example31_subspace();
    let v = CSeq::from_entries([(1, rat(7, 3)), (2, int(5))], int(1));
    assert_eq!(quotientproj::quotient_norm(&y, &v).unwrap().value, int(5));
    let v = CSeq::from_entries([(1, int(1)), (2, int(3)), (3, int(2))], int(0));
    assert_eq!(quotientproj::quotient_norm(&y, &v).unwrap().value, int(3));
}

#[test]
fn norming_vectors_by_float_evaluation() {
    let mut rng = sample::rng(105);
    for (name, w) in fixtures::hyperplanes() {
        if w.check_dual_hypotheses().is_err() {
            continue;
        }
        for _ in 0..10 {
            let g = L1Seq::from_finite((1..=5).map(|i| (i, rat(rng.gen_range(-5..=5), rng.gen_range(1..5)))));
            if g.is_zero() {
                continue;
            }
            let eps = rat(1, 100);
            let x = w.norming_vector(&g, &eps).unwrap();
            let xs: Vec<f64> = (1..=TERMS).map(|n| to_f64(&x.entry(n))).collect();
            let gx: f64 = floats(&g, 5).iter().zip(&xs).map(|(a, b)| a * b).sum();
            assert!(xs.iter().all(|v| v.abs() <= 1.0 + 1e-12), "{name}");
            assert!(gx > to_f64(&g.l1_norm()) - 0.01 - 1e-12, "{name}: g(x) = {gx}");
            let fx: f64 = to_f64(&w.f().entry(1)) * to_f64(x.limit())
                + floats(w.f(), TERMS + 1)[1..].iter().zip(&xs).map(|(a, b)| a * b).sum::<f64>();
            assert!(fx.abs() < 1e-9, "{name}: f(x) ≈ {fx}");
        }
    }
}
