//! Order-preserving map over an index range, parallel when the `parallel`
//! feature is enabled and sequential otherwise.
//!
//! Results are always collected in index order and reduced sequentially by
//! callers, so the two modes are bit-identical: parallelism only changes who
//! computes each item, never the arithmetic or its order of combination.

/// Map `f` over `0..n`, collecting results in index order.
///
/// Dispatches to the parallel implementation when the `parallel` feature is
/// on and `n` is large enough to amortize the fork cost.
pub fn ordered_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if n >= 64 {
            return ordered_map_par(n, f);
        }
    }
    ordered_map_seq(n, f)
}

/// Sequential implementation, always available.
pub fn ordered_map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Parallel implementation on the rayon pool.
#[cfg(feature = "parallel")]
pub fn ordered_map_par<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}
