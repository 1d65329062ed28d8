//! `P(x) = x̄*(x)e₀ + Σ_j (x*_{n_j} − x̄*)(x) e_{n_j−1}` from explicit
//! functional data.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperplane::WfSpace;
use crate::seq::{CSeq, L1Seq};

/// Where the inputs of a projection live. Functionals act through the `c`
/// pairing in both cases; a hyperplane ambient only restricts the inputs.
#[derive(Clone, Debug, PartialEq)]
pub enum Ambient {
    C,
    Hyperplane(WfSpace),
}

/// Indices `n_1 < n_2 < …` with `n_1 > 1`, the limit `x̄*` and the
/// functionals `x*_{n_j}`; for `j` past the list `x*_{n_j} = x̄*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProjectionWire", into = "ProjectionWire")]
pub struct ProjectionData {
    ambient: Ambient,
    nj: Vec<usize>,
    xbar: L1Seq,
    xnj: Vec<L1Seq>,
}

#[derive(Serialize, Deserialize)]
struct ProjectionWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hyperplane: Option<L1Seq>,
    nj: Vec<usize>,
    xbar: L1Seq,
    xnj: Vec<L1Seq>,
}

impl TryFrom<ProjectionWire> for ProjectionData {
    type Error = Error;

    fn try_from(w: ProjectionWire) -> Result<Self> {
        let ambient = match w.hyperplane {
            Some(f) => Ambient::Hyperplane(WfSpace::new(f)?),
            None => Ambient::C,
        };
        ProjectionData::new(ambient, w.nj, w.xbar, w.xnj)
    }
}

impl From<ProjectionData> for ProjectionWire {
    fn from(p: ProjectionData) -> Self {
        ProjectionWire {
            hyperplane: match p.ambient {
                Ambient::C => None,
                Ambient::Hyperplane(w) => Some(w.f().clone()),
            },
            nj: p.nj,
            xbar: p.xbar,
            xnj: p.xnj,
        }
    }
}

impl ProjectionData {
    /// Checks the index shape only; norms are reported by [`projection_checks`].
    pub fn new(ambient: Ambient, nj: Vec<usize>, xbar: L1Seq, xnj: Vec<L1Seq>) -> Result<Self> {
        if nj.len() != xnj.len() {
            return Err(Error::hypothesis(format!("{} indices but {} functionals", nj.len(), xnj.len())));
        }
        if nj.first().is_some_and(|&n| n <= 1) {
            return Err(Error::hypothesis("the first index must exceed 1"));
        }
        if nj.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::hypothesis("indices must increase"));
        }
        Ok(ProjectionData { ambient, nj, xbar, xnj })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn nj(&self) -> &[usize] {
        &self.nj
    }

    pub fn xbar(&self) -> &L1Seq {
        &self.xbar
    }

    pub fn xnj(&self) -> &[L1Seq] {
        &self.xnj
    }

    /// Is `y` in `{y ∈ c : y(s) = lim y for s ∉ {n_j − 1}}`?
    pub fn in_range(&self, y: &CSeq) -> bool {
        y.prefix().iter().all(|(i, v)| v == y.limit() || self.nj.contains(&(i + 1)))
    }
}

pub fn projection(p: &ProjectionData, x: &CSeq) -> Result<CSeq> {
    if let Ambient::Hyperplane(w) = &p.ambient {
        if !w.member(x) {
            return Err(Error::hypothesis("input is not in the ambient hyperplane"));
        }
    }
    let limit = p.xbar.pair_c(x);
    let entries = p.nj.iter().zip(&p.xnj).map(|(&n, g)| (n - 1, g.pair_c(x)));
    Ok(CSeq::from_entries(entries, limit).canonical())
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ProjectionReport {
    pub samples: usize,
    pub data_norms: bool,
    pub idempotent: bool,
    pub norm_nonincreasing: bool,
    pub identity_on_range: bool,
    pub failures: Vec<String>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact checks of idempotence, `‖P(x)‖ ≤ ‖x‖` and `P|_Y = id` on samples.
pub fn projection_checks(p: &ProjectionData, samples: &[CSeq]) -> ProjectionReport {
    let mut r = ProjectionReport {
        samples: samples.len(),
        data_norms: true,
        idempotent: true,
        norm_nonincreasing: true,
        identity_on_range: true,
        failures: Vec::new(),
    };
    if p.xbar.l1_norm() > num_traits::one() {
        r.data_norms = false;
        r.failures.push(format!("‖x̄*‖ = {} > 1", p.xbar.l1_norm()));
    }
    for (j, g) in p.xnj.iter().enumerate() {
        if !g.l1_norm().is_one() {
            r.data_norms = false;
            r.failures.push(format!("‖x*_{}‖ = {} ≠ 1", p.nj[j], g.l1_norm()));
        }
    }
    for (k, x) in samples.iter().enumerate() {
        let px = match projection(p, x) {
            Ok(px) => px,
            Err(e) => {
                r.failures.push(format!("sample {k}: {e}"));
                continue;
            }
        };
        if px.sup_norm() > x.sup_norm() {
            r.norm_nonincreasing = false;
            r.failures.push(format!("sample {k}: ‖P(x)‖ = {} > ‖x‖ = {}", px.sup_norm(), x.sup_norm()));
        }
        // P(P(x)) via the same functionals, extended to all of c
        let ppx = CSeq::from_entries(
            p.nj.iter().zip(&p.xnj).map(|(&n, g)| (n - 1, g.pair_c(&px))),
            p.xbar.pair_c(&px),
        );
        if ppx != px {
            r.idempotent = false;
            r.failures.push(format!("sample {k}: P(P(x)) ≠ P(x)"));
        }
        // the range element agreeing with x at the selected coordinates
        let y = CSeq::from_entries(p.nj.iter().map(|&n| (n - 1, x.entry(n - 1))), x.limit().clone());
        let py = CSeq::from_entries(p.nj.iter().zip(&p.xnj).map(|(&n, g)| (n - 1, g.pair_c(&y))), p.xbar.pair_c(&y));
        if py != y {
            r.identity_on_range = false;
            r.failures.push(format!("sample {k}: P(y) ≠ y on the range"));
        }
    }
    r
}
