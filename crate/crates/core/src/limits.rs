//! Enumeration bounds and the sequential/parallel execution switch.
//!
//! Every exhaustive sweep in the crate takes a [`Limits`]. With the
//! `parallel` feature disabled, [`Exec::Parallel`] silently runs the
//! sequential path, so results never depend on the build.

/// How data-parallel sweeps are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Bounds on the exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest universe for which congruence lattices are built.
    pub max_universe: usize,
    /// Largest number of candidate maps a homomorphism search may visit.
    pub max_search: u128,
    pub exec: Exec,
}

pub const DEFAULT_MAX_UNIVERSE: usize = 9;
pub const DEFAULT_MAX_SEARCH: u128 = 10_000_000;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_universe: DEFAULT_MAX_UNIVERSE,
            max_search: DEFAULT_MAX_SEARCH,
            exec: Exec::default(),
        }
    }
}

impl Limits {
    pub fn with_exec(self, exec: Exec) -> Self {
        Limits { exec, ..self }
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn saturating_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc == u128::MAX {
            break;
        }
    }
    acc
}

/// Order-preserving map over a slice, fanned out with rayon when allowed.
pub(crate) fn map_ordered<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}
