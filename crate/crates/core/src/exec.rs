//! Chunked execution with per-chunk random streams.

use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Runs `f(0..chunks)` and returns the results in index order.
pub trait Executor: Sync {
    fn map_chunks<T, F>(&self, chunks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every chunk on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_chunks<T, F>(&self, chunks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..chunks).map(f).collect()
    }
}

/// Independent generator for chunk `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform double in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform double in `(0, 1]`; safe to take the logarithm of.
#[inline]
pub fn open_unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    1.0 - unit_f64(rng)
}

/// Uniform integer in `[0, n)` by rejection, free of modulo bias.
pub fn below<R: RngCore>(rng: &mut R, n: u64) -> u64 {
    assert!(n > 0);
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % n;
        }
    }
}

/// Fisher-Yates shuffle.
pub fn shuffle<R: RngCore, T>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// Splits `total` work items into chunks of `chunk` items; returns
/// `(chunk_count, size_of(i))`.
pub fn chunk_sizes(total: u64, chunk: u64) -> (usize, impl Fn(usize) -> u64) {
    let n = total.div_ceil(chunk) as usize;
    (n, move |i: usize| {
        let start = i as u64 * chunk;
        chunk.min(total - start)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ_and_repeat() {
        let a: Vec<u64> = (0..4).map(|_| stream_rng(7, 0).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(stream_rng(7, 0).next_u64(), stream_rng(7, 1).next_u64());
    }

    #[test]
    fn chunking_covers_total() {
        let (n, size) = chunk_sizes(10, 4);
        assert_eq!(n, 3);
        assert_eq!((0..n).map(&size).sum::<u64>(), 10);
        assert_eq!(size(2), 2);
    }
}
