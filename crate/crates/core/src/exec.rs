//! Execution strategy for the data-parallel loops in this crate.
//!
//! Every search or scan that fans out over independent work items takes an
//! [`Exec`]. With the `parallel` feature (on by default) `Exec::Parallel`
//! runs the items on the rayon pool; without the feature, or with
//! `Exec::Sequential`, the same closures run in order on the calling thread.
//! Results are always returned in item order, so reductions built on top of
//! these helpers are deterministic regardless of the strategy.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How to run a fan-out loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
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
    /// The strategy that will actually run: `Parallel` degrades to
    /// `Sequential` when the crate is built without the `parallel` feature.
    pub fn effective(self) -> Exec {
        if cfg!(feature = "parallel") {
            self
        } else {
            Exec::Sequential
        }
    }

    pub fn is_parallel(self) -> bool {
        self.effective() == Exec::Parallel
    }

    /// Maps `f` over `range`, preserving order.
    pub fn map_range<R, F>(self, range: Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self.effective() {
            #[cfg(feature = "parallel")]
            Exec::Parallel => range.into_par_iter().map(f).collect(),
            _ => range.map(f).collect(),
        }
    }

    /// Maps `f` over the items of a slice, preserving order.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self.effective() {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// The first (lowest index) `Some` produced by `f` over `range`.
    pub fn find_first<R, F>(self, range: Range<usize>, f: F) -> Option<R>
    where
        R: Send,
        F: Fn(usize) -> Option<R> + Sync + Send,
    {
        match self.effective() {
            #[cfg(feature = "parallel")]
            Exec::Parallel => range.into_par_iter().find_map_first(f),
            _ => range.into_iter().find_map(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let seq = Exec::Sequential.map_range(0..100, |i| i * i);
        let par = Exec::Parallel.map_range(0..100, |i| i * i);
        assert_eq!(seq, par);
        let first = |i: usize| (i % 7 == 3 && i > 20).then_some(i);
        assert_eq!(Exec::Sequential.find_first(0..100, first), Some(24));
        assert_eq!(Exec::Parallel.find_first(0..100, first), Some(24));
    }

    #[test]
    fn default_follows_feature() {
        assert_eq!(Exec::default().is_parallel(), cfg!(feature = "parallel"));
    }
}
