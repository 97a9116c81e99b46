//! Execution strategy for the data-parallel summations.
//!
//! With the `parallel` feature (the default) the reductions below fan out
//! over rayon's global pool; without it they run sequentially. Results are
//! identical either way because every reduction is an associative sum.
//! The `*_seq` variants are always compiled so callers (and benches) can
//! force the sequential path in a parallel build.

pub(crate) fn sum_over_seq<I, T, F>(items: Vec<I>, f: F) -> T
where
    T: std::iter::Sum<T>,
    F: Fn(I) -> T,
{
    items.into_iter().map(f).sum()
}

#[cfg(feature = "parallel")]
pub(crate) fn sum_over<I, T, F>(items: Vec<I>, f: F) -> T
where
    I: Send,
    T: std::iter::Sum<T> + Send,
    F: Fn(I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).sum()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sum_over<I, T, F>(items: Vec<I>, f: F) -> T
where
    I: Send,
    T: std::iter::Sum<T> + Send,
    F: Fn(I) -> T + Sync + Send,
{
    sum_over_seq(items, f)
}
