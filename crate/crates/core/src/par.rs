//! Deterministic data-parallel reductions.
//!
//! Work is split into fixed-size blocks whose boundaries do not depend on
//! the number of worker threads. Each block is reduced sequentially and the
//! block partials are then summed in block order, so results are
//! bit-identical between the rayon path, a one-thread pool, and the
//! sequential build (`--no-default-features`).

use num_complex::Complex64;

/// Rows per block for `block_sum`.
pub const BLOCK: usize = 64;

/// Sum `term(i)` for `i in 0..n` using the fixed block decomposition.
pub fn block_sum<F>(n: usize, term: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    block_fold(n, |range| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in range {
            acc += term(i);
        }
        acc
    })
}

/// Apply `block` to each fixed block of `0..n` and sum the partials in order.
pub fn block_fold<F>(n: usize, block: F) -> Complex64
where
    F: Fn(std::ops::Range<usize>) -> Complex64 + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let partials = map_indices(blocks, |b| block(b * BLOCK..((b + 1) * BLOCK).min(n)));
    partials.into_iter().sum()
}

/// Real-valued variant of [`block_sum`].
pub fn block_sum_real<F>(n: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let partials = map_indices(blocks, |b| {
        let mut acc = 0.0;
        for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
            acc += term(i);
        }
        acc
    });
    partials.into_iter().sum()
}

/// Evaluate `f(i)` for every `i in 0..n`, preserving index order.
#[cfg(feature = "parallel")]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(&f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    (0..n).map(f).collect()
}

/// True when the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
