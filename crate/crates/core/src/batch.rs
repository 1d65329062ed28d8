//! Order-preserving batch evaluation, data-parallel when the `parallel`
//! feature is enabled.

use serde::Serialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Sequential,
    #[default]
    Parallel,
}

impl Mode {
    /// The mode actually used: `Parallel` degrades to `Sequential` when the
    /// crate is built without the `parallel` feature.
    pub fn effective(self) -> Mode {
        if cfg!(feature = "parallel") {
            self
        } else {
            Mode::Sequential
        }
    }
}

/// `items.iter().map(f)` collected in input order.
pub fn map<T, R, F>(mode: Mode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode.effective() {
        Mode::Sequential => items.iter().map(f).collect(),
        Mode::Parallel => par_map(items, f),
    }
}

/// First error in input order, or all results.
pub fn try_map<T, R, E, F>(mode: Mode, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(mode, items, f).into_iter().collect()
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Mode::Sequential, &xs, |x| x * x);
        let b = map(Mode::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
    }

    #[test]
    fn first_error_in_order() {
        let xs: Vec<i32> = (0..100).collect();
        let r: Result<Vec<i32>, i32> = try_map(Mode::Parallel, &xs, |&x| if x % 30 == 29 { Err(x) } else { Ok(x) });
        assert_eq!(r, Err(29));
    }
}
