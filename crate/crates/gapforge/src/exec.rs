use gapforge_core::Executor;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};

/// Fans chunks out over a dedicated rayon pool. Results come back in chunk
/// order, so output never depends on the number of threads.
pub struct PoolExecutor {
    pool: ThreadPool,
}

impl PoolExecutor {
    /// `jobs == 0` lets rayon pick the thread count.
    pub fn new(jobs: usize) -> Result<Self, ThreadPoolBuildError> {
        Ok(Self { pool: ThreadPoolBuilder::new().num_threads(jobs).build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for PoolExecutor {
    fn map_chunks<T, F>(&self, chunks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..chunks).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gapforge_core::primes::{record_gaps, record_gaps_with};

    #[test]
    fn order_is_preserved() {
        let exec = PoolExecutor::new(4).unwrap();
        assert_eq!(exec.map_chunks(1000, |i| i * i), (0..1000).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn parallel_gap_scan_matches_sequential() {
        let exec = PoolExecutor::new(3).unwrap();
        assert_eq!(record_gaps_with(5_000_000, &exec), record_gaps(5_000_000));
    }
}
