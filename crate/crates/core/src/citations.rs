//! Short tags naming the facts each computed predicate rests on.

/// `(tag, statement)` pairs.
pub const TAGS: &[(&str, &str)] = &[
    ("fact:dual-l1", "W_f* is isometric to l1 exactly when some |f(j)| ≥ 1/2"),
    ("fact:iso-c", "W_f is isometric to c exactly when |f(j)| ≥ 1/2 for some j ≥ 2"),
    ("prop:c-subspace", "for |f(1)| ≥ 1/2, W_f contains c isometrically iff |f(1)| = 1/2, f(1)f(n+1) > 0 for finitely many n, and f(n+1) = 0 for infinitely many n"),
    ("prop:wstar-fpp", "for 1/2 ≤ |f(1)| < 1 and |f(j)| < 1/2 otherwise, l1 has the weak-star FPP iff N+ is finite or |f(1)| > 1/2"),
    ("def:bad-hyperplane", "W_f is bad when |f(1)| = 1/2 and N+ is infinite"),
    ("fact:limit-functional", "under the dual-action hypotheses the weak-star limit e* of the unit basis acts as the limit functional on W_f"),
    ("thm:bad-subspace", "a space containing a bad W_f has a dual failing the weak-star FPP, witnessed by a fixed-point-free shift"),
    ("thm:c-quotient", "a quotient isometric to c forces the weak-star FPP to fail, whether or not c embeds"),
    ("prop:one-complemented", "a copy of c inside a separable space can be chosen 1-complemented"),
    ("thm:basis-limit", "a bad W_f embeds when the dual unit basis has a subsequence with a norm-one weak-star limit"),
];

pub fn describe(tag: &str) -> Option<&'static str> {
    TAGS.iter().find(|(t, _)| *t == tag).map(|(_, d)| *d)
}
