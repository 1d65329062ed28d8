//! Named regression fixtures.

use crate::error::{Error, Result};
use crate::extraction::FunctionalFamily;
use crate::hyperplane::WfSpace;
use crate::quotientproj::{Ambient, ProjectionData};
use crate::rational::{int, rat, Rational};
use crate::seq::{GeomTail, L1Seq};

/// `f = (1/2, −1/4, 1/8, −1/16, …)`.
pub fn example22_f() -> L1Seq {
    L1Seq::with_tail([(1, rat(1, 2))], GeomTail::new(2, 1, rat(-1, 4), rat(-1, 2)).unwrap()).unwrap()
}

/// `f = (−1/2, 1/4, 0, −1/8, 0, 1/16, 0, …)`.
pub fn example31_f() -> L1Seq {
    L1Seq::with_tail([(1, rat(-1, 2))], GeomTail::new(2, 2, rat(1, 4), rat(-1, 2)).unwrap()).unwrap()
}

/// `f = (1/2, 1/2, 0, …)`, for which `W_f` is a copy of `c`.
pub fn c_like_f() -> L1Seq {
    L1Seq::from_finite([(1, rat(1, 2)), (2, rat(1, 2))])
}

/// `f_ε = (1/(2−ε), −(1−ε)/(2−ε), 0, …)` for `0 < ε < 1`.
pub fn f_eps_f(eps: &Rational) -> Result<L1Seq> {
    if *eps <= int(0) || *eps >= int(1) {
        return Err(Error::hypothesis(format!("ε must lie in the open interval (0, 1), got {eps}")));
    }
    let d = int(2) - eps;
    Ok(L1Seq::from_finite([(1, d.recip()), (2, -(int(1) - eps) / &d)]))
}

/// `f = (1/2, −1/4, −1/8, …)`: bad, with a positive limit functional
/// `e* = (1/2, 1/4, 1/8, …)`.
pub fn geometric_f() -> L1Seq {
    L1Seq::with_tail([(1, rat(1, 2))], GeomTail::new(2, 1, rat(-1, 4), rat(1, 2)).unwrap()).unwrap()
}

pub fn example22() -> WfSpace {
    WfSpace::new(example22_f()).unwrap()
}

pub fn example31() -> WfSpace {
    WfSpace::new(example31_f()).unwrap()
}

pub fn c_like() -> WfSpace {
    WfSpace::new(c_like_f()).unwrap()
}

pub fn f_eps(eps: &Rational) -> Result<WfSpace> {
    WfSpace::new(f_eps_f(eps)?)
}

pub fn geometric() -> WfSpace {
    WfSpace::new(geometric_f()).unwrap()
}

/// Every hyperplane fixture with `|f(1)| ≥ 1/2`, by name.
pub fn hyperplanes() -> Vec<(&'static str, WfSpace)> {
    vec![
        ("example22", example22()),
        ("example31", example31()),
        ("c_like", c_like()),
        ("f_eps_half", f_eps(&rat(1, 2)).unwrap()),
        ("geometric", geometric()),
    ]
}

/// `(e*_n)_{n=1..len}`, driven by the geometric hyperplane.
pub fn unit_family(len: usize) -> FunctionalFamily {
    FunctionalFamily {
        members: (1..=len).map(L1Seq::unit).collect(),
        limit_hint: None,
        predual: Some(geometric_f()),
    }
}

/// `((3/4)e*_{2n} − (1/4)e*_{2n+1})_{n=1..len}`, driven by `f = (1/2, 1/2, 0, …)`.
pub fn mixed_family(len: usize) -> FunctionalFamily {
    FunctionalFamily {
        members: (1..=len)
            .map(|n| L1Seq::from_finite([(2 * n, rat(3, 4)), (2 * n + 1, rat(-1, 4))]))
            .collect(),
        limit_hint: None,
        predual: Some(c_like_f()),
    }
}

/// Projection data on the `c` ambient: `x̄*` the limit functional and
/// `x*_{n_j} = e*_{2j+1}` (coordinate `2j` in the `c` pairing) for `j ≤ len`.
pub fn c_projection(len: usize) -> ProjectionData {
    let nj: Vec<usize> = (1..=len).map(|j| 2 * j + 1).collect();
    let xnj = nj.iter().map(|&n| L1Seq::unit(n)).collect();
    ProjectionData::new(Ambient::C, nj, L1Seq::unit(1), xnj).unwrap()
}

/// The emitted fixture files as `(file name, pretty JSON)`.
pub fn files() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = vec![
        ("example22.json".into(), to_json(&example22_f())),
        ("example31.json".into(), to_json(&example31_f())),
        ("c_like.json".into(), to_json(&c_like_f())),
        ("f_eps.json".into(), to_json(&f_eps_f(&rat(1, 2)).unwrap())),
        ("geometric.json".into(), to_json(&geometric_f())),
        ("unit_family.json".into(), to_json(&unit_family(8))),
        ("mixed_family.json".into(), to_json(&mixed_family(8))),
        ("c_projection.json".into(), to_json(&c_projection(4))),
    ];
    for (_, s) in &mut out {
        s.push('\n');
    }
    out
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("fixtures serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_eps_half() {
        assert_eq!(
            serde_json::to_string(&f_eps_f(&rat(1, 2)).unwrap()).unwrap(),
            r#"{"finite":{"1":"2/3","2":"-1/3"}}"#
        );
        assert!(f_eps_f(&int(0)).is_err());
        assert!(f_eps_f(&int(1)).is_err());
    }

    #[test]
    fn example31_entry_six() {
        let (_, s) = files().into_iter().find(|(n, _)| n == "example31.json").unwrap();
        let f: L1Seq = serde_json::from_str(&s).unwrap();
        assert_eq!(f.entry(6).to_string(), "1/16");
    }

    #[test]
    fn files_round_trip_byte_exact() {
        fn again<T: serde::Serialize + serde::de::DeserializeOwned>(s: &str) -> String {
            to_json(&serde_json::from_str::<T>(s).unwrap()) + "\n"
        }
        for (name, s) in files() {
            let r = if name.ends_with("family.json") {
                again::<FunctionalFamily>(&s)
            } else if name == "c_projection.json" {
                again::<ProjectionData>(&s)
            } else {
                again::<L1Seq>(&s)
            };
            assert_eq!(r, s, "{name}");
        }
    }
}
