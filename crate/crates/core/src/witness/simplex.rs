//! Points of the infinite simplex `{λ : λ_k ≥ 0, Σ λ_k = 1}` with an exact
//! finite description, and the maps acting on them.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::rational::{pow, rat, RatStr, Rational};

/// `λ_i = P(i − start)·r^{i − start}` for `i ≥ start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiTail {
    pub start: usize,
    pub poly: Poly,
    pub ratio: Rational,
}

impl QuasiTail {
    pub fn coeff(&self, i: usize) -> Rational {
        if i < self.start {
            return Rational::zero();
        }
        let u = i - self.start;
        self.poly.eval(u) * pow(&self.ratio, u)
    }

    pub fn sum(&self) -> Rational {
        self.poly.geometric_sum(&self.ratio)
    }

    pub fn abs_sum(&self) -> Rational {
        self.poly.abs_geometric_sum(&self.ratio)
    }

    /// The same tail beginning `k` places later.
    pub fn advance(&self, k: usize) -> QuasiTail {
        QuasiTail {
            start: self.start + k,
            poly: self.poly.shift(k).scale(&pow(&self.ratio, k)),
            ratio: self.ratio.clone(),
        }
    }
}

/// Coefficients `(λ_1, λ_2, …)`: a dense head plus an optional tail.
#[derive(Clone, Debug)]
pub struct SimplexPoint {
    head: Vec<Rational>,
    tail: Option<QuasiTail>,
}

impl SimplexPoint {
    pub fn new(head: Vec<Rational>, tail: Option<QuasiTail>) -> Result<Self> {
        let p = SimplexPoint::raw(head, tail)?;
        if p.head.iter().any(Signed::is_negative) {
            return Err(Error::hypothesis("simplex coefficients must be nonnegative"));
        }
        if let Some(t) = &p.tail {
            if !t.poly.nonnegative() {
                return Err(Error::hypothesis("simplex tail must be nonnegative"));
            }
        }
        let s = p.sum();
        if !s.is_one() {
            return Err(Error::hypothesis(format!("simplex coefficients must sum to 1, got {s}")));
        }
        Ok(p)
    }

    /// Shape checks only (used for differences, which are not simplex points).
    fn raw(mut head: Vec<Rational>, tail: Option<QuasiTail>) -> Result<Self> {
        let tail = tail.filter(|t| !t.poly.is_zero());
        if let Some(t) = &tail {
            if t.ratio <= Rational::zero() || t.ratio >= Rational::one() {
                return Err(Error::Parse("tail ratio must lie in (0, 1)".into()));
            }
            if t.start == 0 || t.start <= head.len() {
                return Err(Error::Parse("tail must start after the dense head".into()));
            }
            head.resize(t.start - 1, Rational::zero());
        } else {
            while head.last().is_some_and(Zero::is_zero) {
                head.pop();
            }
        }
        Ok(SimplexPoint { head, tail })
    }

    /// The vertex `λ = e_k` (1-based).
    pub fn vertex(k: usize) -> Self {
        assert!(k >= 1);
        let mut head = vec![Rational::zero(); k];
        head[k - 1] = Rational::one();
        SimplexPoint { head, tail: None }
    }

    /// `(1/2, 1/4, 1/8, …)`.
    pub fn halving() -> Self {
        SimplexPoint::new(
            vec![],
            Some(QuasiTail { start: 1, poly: Poly::constant(rat(1, 2)), ratio: rat(1, 2) }),
        )
        .unwrap()
    }

    pub fn finite(head: Vec<Rational>) -> Result<Self> {
        SimplexPoint::new(head, None)
    }

    pub fn head(&self) -> &[Rational] {
        &self.head
    }

    pub fn tail(&self) -> Option<&QuasiTail> {
        self.tail.as_ref()
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.tail.is_none()
    }

    pub fn coeff(&self, i: usize) -> Rational {
        assert!(i >= 1);
        if i <= self.head.len() {
            return self.head[i - 1].clone();
        }
        self.tail.as_ref().map(|t| t.coeff(i)).unwrap_or_else(Rational::zero)
    }

    pub fn sum(&self) -> Rational {
        let h: Rational = self.head.iter().sum();
        h + self.tail.as_ref().map(QuasiTail::sum).unwrap_or_else(Rational::zero)
    }

    /// `Σ |λ_k|` (differences of points may be signed).
    pub fn abs_sum(&self) -> Rational {
        let h: Rational = self.head.iter().map(|x| x.abs()).sum();
        h + self.tail.as_ref().map(QuasiTail::abs_sum).unwrap_or_else(Rational::zero)
    }

    /// Dense head up to index `at − 1`, tail from `at` on.
    fn split(&self, at: usize) -> (Vec<Rational>, Option<QuasiTail>) {
        let mut head = self.head.clone();
        let tail = self.tail.as_ref().map(|t| {
            if t.start >= at {
                t.clone()
            } else {
                let k = at - t.start;
                head.extend((t.start..at).map(|i| t.coeff(i)));
                t.advance(k)
            }
        });
        head.resize(head.len().max(at - 1), Rational::zero());
        (head, tail)
    }

    /// `self − other` as a coefficient sequence.
    pub fn difference(&self, other: &SimplexPoint) -> Result<SimplexPoint> {
        let at = [
            self.head.len() + 1,
            other.head.len() + 1,
            self.tail.as_ref().map_or(1, |t| t.start),
            other.tail.as_ref().map_or(1, |t| t.start),
        ]
        .into_iter()
        .max()
        .unwrap();
        let (a, ta) = self.split(at);
        let (b, tb) = other.split(at);
        let head: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let tail = match (ta, tb) {
            (None, None) => None,
            (Some(t), None) => Some(t),
            (None, Some(t)) => Some(QuasiTail { poly: t.poly.scale(&-Rational::one()), ..t }),
            (Some(s), Some(t)) => {
                if s.ratio != t.ratio {
                    return Err(Error::repr(format!(
                        "coefficient tails with ratios {} and {} cannot be compared in closed form",
                        s.ratio, t.ratio
                    )));
                }
                Some(QuasiTail { poly: s.poly.sub(&t.poly), ..s })
            }
        };
        SimplexPoint::raw(head, tail)
    }

    /// `Σ_k |λ_k − μ_k|`.
    pub fn distance(&self, other: &SimplexPoint) -> Result<Rational> {
        Ok(self.difference(other)?.abs_sum())
    }

    /// `(λ₁, λ₂, …) ↦ (0, λ₁, λ₂, …)`.
    pub fn shift(&self) -> SimplexPoint {
        let mut head = Vec::with_capacity(self.head.len() + 1);
        head.push(Rational::zero());
        head.extend(self.head.iter().cloned());
        let tail = self.tail.as_ref().map(|t| QuasiTail { start: t.start + 1, ..t.clone() });
        SimplexPoint { head, tail }
    }

    /// `S(λ) = Σ_{j≥0} T^j(λ)/2^{j+1}`, i.e. `S_k = (λ_k + S_{k−1})/2`.
    pub fn contraction(&self) -> Result<SimplexPoint> {
        let half = rat(1, 2);
        let mut out = Vec::with_capacity(self.head.len());
        let mut prev = Rational::zero();
        for l in &self.head {
            prev = (l + &prev) * &half;
            out.push(prev.clone());
        }
        let tail = match &self.tail {
            None => QuasiTail {
                start: self.head.len() + 1,
                poly: Poly::constant(&prev * &half),
                ratio: half,
            },
            Some(t) if t.ratio == half => {
                // S_{s+u} = 2^{-u}·(Q(u) + S_{s−1})/2 with Q the prefix sum of P
                let q = t.poly.prefix_sum().add(&Poly::constant(prev));
                QuasiTail { start: t.start, poly: q.scale(&half), ratio: half }
            }
            Some(t) => {
                return Err(Error::repr(format!(
                    "contraction of a tail with ratio {} mixes two geometric rates",
                    t.ratio
                )))
            }
        };
        SimplexPoint::raw(out, Some(tail))
    }
}

impl PartialEq for SimplexPoint {
    fn eq(&self, other: &Self) -> bool {
        self.difference(other).map(|d| d.abs_sum().is_zero()).unwrap_or(false)
    }
}

#[derive(Serialize, Deserialize)]
struct TailWire {
    start: usize,
    poly: Vec<RatStr>,
    ratio: RatStr,
}

#[derive(Serialize, Deserialize)]
struct PointWire {
    head: Vec<RatStr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailWire>,
}

impl Serialize for SimplexPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointWire {
            head: self.head.iter().cloned().map(RatStr).collect(),
            tail: self.tail.as_ref().map(|t| TailWire {
                start: t.start,
                poly: t.poly.coeffs().iter().cloned().map(RatStr).collect(),
                ratio: RatStr(t.ratio.clone()),
            }),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimplexPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = PointWire::deserialize(d)?;
        let tail = w.tail.map(|t| QuasiTail {
            start: t.start,
            poly: Poly::new(t.poly.into_iter().map(|c| c.0).collect()),
            ratio: t.ratio.0,
        });
        SimplexPoint::new(w.head.into_iter().map(|c| c.0).collect(), tail).map_err(D::Error::custom)
    }
}

/// A point with its displacement trail under repeated application of a map.
pub fn displacements(
    start: &SimplexPoint,
    steps: usize,
    map: impl Fn(&SimplexPoint) -> Result<SimplexPoint>,
) -> Result<Vec<Rational>> {
    let mut cur = start.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next = map(&cur)?;
        out.push(cur.distance(&next)?);
        cur = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn shift_examples() {
        assert_eq!(SimplexPoint::vertex(1).shift(), SimplexPoint::vertex(2));
        let p = SimplexPoint::finite(vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(p.shift(), SimplexPoint::finite(vec![int(0), rat(1, 2), rat(1, 2)]).unwrap());
        let h = SimplexPoint::halving().shift();
        assert_eq!(h.coeff(1), int(0));
        assert_eq!(h.coeff(2), rat(1, 2));
        assert_eq!(h.coeff(3), rat(1, 4));
        assert_eq!(h.sum(), int(1));
        assert_ne!(h, SimplexPoint::halving());
    }

    #[test]
    fn contraction_examples() {
        let s = SimplexPoint::vertex(1).contraction().unwrap();
        assert_eq!(s, SimplexPoint::halving());
        let s2 = SimplexPoint::vertex(2).contraction().unwrap();
        assert_eq!(s2.coeff(1), int(0));
        assert_eq!(s2.coeff(2), rat(1, 2));
        assert_eq!(s2.coeff(3), rat(1, 4));
        assert_eq!(s.distance(&s2).unwrap(), int(1));
        assert_eq!(s.distance(&SimplexPoint::vertex(1)).unwrap(), int(1));
        // iterating keeps the sum and builds polynomial tails
        let mut p = SimplexPoint::vertex(1);
        for _ in 0..5 {
            p = p.contraction().unwrap();
            assert_eq!(p.sum(), int(1));
        }
        assert_eq!(p.tail().unwrap().poly.degree(), 4);
        // direct convolution check of S^2(e_1) at k = 3: Σ_j 2^{-(j+1)} S(e1)_{3−j}
        let s1 = SimplexPoint::vertex(1).contraction().unwrap();
        let s2 = s1.contraction().unwrap();
        let direct: Rational = (0..3).map(|j| s1.coeff(3 - j) * crate::rational::inv_pow2(j + 1)).sum();
        assert_eq!(s2.coeff(3), direct);
    }

    #[test]
    fn foreign_ratio_contraction_rejected() {
        let p = SimplexPoint::new(
            vec![],
            Some(QuasiTail { start: 1, poly: Poly::constant(rat(2, 3)), ratio: rat(1, 3) }),
        )
        .unwrap();
        assert!(matches!(p.contraction(), Err(Error::Representability(_))));
    }

    #[test]
    fn validation() {
        assert!(SimplexPoint::finite(vec![rat(1, 2)]).is_err());
        assert!(SimplexPoint::finite(vec![int(2), int(-1)]).is_err());
        let s = serde_json::to_string(&SimplexPoint::halving()).unwrap();
        let back: SimplexPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, SimplexPoint::halving());
    }
}
