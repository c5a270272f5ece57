//! Execution strategy and resource limits.
//!
//! `Exec::Parallel` uses rayon when the `parallel` feature is enabled and
//! silently degrades to sequential iteration otherwise. Both paths produce
//! identical results because every parallel map collects in input order and
//! reductions over field values happen sequentially afterwards.

/// How data-parallel loops are run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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

impl Exec {
    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel && items.len() > 1 {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps a fallible `f` over `items`; the first error in input order wins.
    pub fn try_map<T, R, E, F>(self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(&T) -> Result<R, E> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }

    /// Maps `f` over `0..n`, preserving order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel && n > 1 {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }
}

/// Default elementary-operation budget for a single homomorphism evaluation.
pub const DEFAULT_HOM_BUDGET: u64 = 100_000_000;

/// Resource caps shared by all expensive operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Estimated field operations allowed in one homomorphism evaluation.
    pub hom_ops: u64,
    /// Largest exponent grid `bound^s` a moment check may scan.
    pub moment_evaluations: u64,
    /// Largest vertex count handed to the factorial isomorphism oracle.
    pub oracle_vertices: usize,
    /// Largest number of label maps enumerated by separating-set and projection code.
    pub map_enumeration: u64,
    /// Largest number of entries in a connection matrix or tensor truncation.
    pub tensor_entries: u64,
    pub exec: Exec,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            hom_ops: DEFAULT_HOM_BUDGET,
            moment_evaluations: 10_000_000,
            oracle_vertices: 8,
            map_enumeration: 1_000_000,
            tensor_entries: 10_000_000,
            exec: Exec::default(),
        }
    }
}

impl Limits {
    /// Defaults, with `hom_ops` overridden by `HOMALG_BUDGET` when it parses.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(b) = std::env::var("HOMALG_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse().ok())
        {
            limits.hom_ops = b;
        }
        limits
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn sequential() -> Self {
        Limits::default().with_exec(Exec::Sequential)
    }
}
