//! Replica scheduling with worker-count-independent results.
//!
//! Tasks are indexed; results are collected in index order and every
//! reduction in the crate folds that ordered vector sequentially. Output is
//! therefore identical for 1 or 64 workers.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

pub struct Workers {
    pool: Option<ThreadPool>,
    count: usize,
}

impl Workers {
    /// `count == 1` runs inline on the calling thread.
    pub fn new(count: usize) -> Self {
        let count = count.max(1);
        let pool = (count > 1).then(|| {
            ThreadPoolBuilder::new()
                .num_threads(count)
                .build()
                .expect("failed to start worker pool")
        });
        Self { pool, count }
    }

    pub fn serial() -> Self {
        Self::new(1)
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `(0..tasks).map(f)` in index order.
    pub fn map<T, F>(&self, tasks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match &self.pool {
            None => (0..tasks).map(f).collect(),
            Some(pool) => pool.install(|| (0..tasks).into_par_iter().map(&f).collect()),
        }
    }
}

impl Default for Workers {
    fn default() -> Self {
        Self::serial()
    }
}
