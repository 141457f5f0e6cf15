//! Parallelism switch for the exhaustive searches.
//!
//! The embedding and hom-set searches are embarrassingly parallel over their
//! seed sets and their results are sorted after collection, so the outcome is
//! identical under either strategy. `Rayon` degrades to sequential execution
//! when the `parallel` feature is disabled.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg_attr(feature = "parallel", default)]
    Rayon,
}

/// Flat-maps `f` over the seeds, in parallel when requested and available.
/// Result order follows seed order either way.
pub(crate) fn flat_map_seeds<T, U, F>(par: Parallelism, seeds: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Vec<U> + Sync + Send,
{
    match par {
        Parallelism::Sequential => seeds.into_iter().flat_map(f).collect(),
        Parallelism::Rayon => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                seeds.into_par_iter().flat_map_iter(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                seeds.into_iter().flat_map(f).collect()
            }
        }
    }
}
