//! Deterministic range reductions.
//!
//! Index ranges are cut into chunks of a fixed width that does not depend on
//! the number of worker threads. Chunk results come back in index order and
//! floating-point partials are combined with a fixed pairwise tree, so the
//! result is bit-identical for any pool size.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Width of one reduction chunk.
pub const CHUNK: u64 = 1 << 14;

/// A sized rayon pool. Library routines run on whatever pool is current, so
/// callers that care about the thread count wrap their work in [`Workers::install`].
pub struct Workers {
    pool: rayon::ThreadPool,
    count: usize,
}

impl Workers {
    pub fn new(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::param("worker count must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(count)
            .build()
            .map_err(|e| Error::param(format!("cannot build worker pool: {e}")))?;
        Ok(Self { pool, count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        self.pool.install(op)
    }
}

/// Applies `f(first, last)` to every chunk of the inclusive range `[lo, hi]`
/// and returns the per-chunk results in index order. Empty when `lo > hi`.
pub fn map_chunks<T, F>(lo: u64, hi: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    if lo > hi {
        return Vec::new();
    }
    let chunks = (hi - lo) / CHUNK + 1;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let first = lo + c * CHUNK;
            let last = first.saturating_add(CHUNK - 1).min(hi);
            f(first, last)
        })
        .collect()
}

/// Sum in a fixed balanced-tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum_complex(l) + pairwise_sum_complex(r)
        }
    }
}

/// Exact integer sum of `f(n)` over `[lo, hi]`, chunked in parallel.
pub fn sum_u128<F>(lo: u64, hi: u64, f: F) -> u128
where
    F: Fn(u64) -> u128 + Sync,
{
    map_chunks(lo, hi, |a, b| (a..=b).map(&f).sum::<u128>())
        .into_iter()
        .sum()
}

/// Floating sum of `f(n)` over `[lo, hi]`: sequential inside a chunk,
/// pairwise across chunks.
pub fn sum_f64<F>(lo: u64, hi: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    let partials = map_chunks(lo, hi, |a, b| (a..=b).map(&f).sum::<f64>());
    pairwise_sum(&partials)
}

pub fn sum_complex<F>(lo: u64, hi: u64, f: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    let partials = map_chunks(lo, hi, |a, b| {
        (a..=b).fold(Complex64::new(0.0, 0.0), |acc, n| acc + f(n))
    });
    pairwise_sum_complex(&partials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        let spans = map_chunks(5, 3 * CHUNK + 7, |a, b| (a, b));
        assert_eq!(spans.first().unwrap().0, 5);
        assert_eq!(spans.last().unwrap().1, 3 * CHUNK + 7);
        for w in spans.windows(2) {
            assert_eq!(w[0].1 + 1, w[1].0);
        }
        assert!(map_chunks(4, 3, |a, b| (a, b)).is_empty());
    }

    #[test]
    fn float_sums_do_not_depend_on_pool_size() {
        let f = |n: u64| (n as f64).sqrt().sin() / n as f64;
        let one = Workers::new(1).unwrap().install(|| sum_f64(1, 200_000, f));
        let eight = Workers::new(8).unwrap().install(|| sum_f64(1, 200_000, f));
        assert_eq!(one.to_bits(), eight.to_bits());
    }

    #[test]
    fn zero_workers_rejected() {
        assert!(Workers::new(0).is_err());
    }
}
