use std::sync::Arc;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use tailproc_core::mc::Executor;

/// Runs shard jobs on a dedicated rayon pool. Results come back in shard
/// order, so the merged Monte Carlo output does not depend on `workers`.
#[derive(Clone)]
pub struct RayonExecutor {
    pool: Arc<ThreadPool>,
    workers: usize,
}

impl std::fmt::Debug for RayonExecutor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RayonExecutor").field("workers", &self.workers).finish()
    }
}

impl RayonExecutor {
    pub fn new(workers: usize) -> Self {
        let workers = workers.max(1);
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("tailproc-{i}"))
            .build()
            .expect("thread pool");
        RayonExecutor {
            pool: Arc::new(pool),
            workers,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Ordered parallel map over `0..len` on this pool.
    pub fn map<T: Send>(&self, len: usize, job: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
        self.pool.install(|| (0..len).into_par_iter().map(job).collect())
    }
}

impl Executor for RayonExecutor {
    fn map_shards<T, F>(&self, shards: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.map(shards, job)
    }
}

/// Worker count: explicit value, else `TAILPROC_WORKERS`, else the number
/// of available CPUs.
pub fn default_workers() -> usize {
    std::env::var("TAILPROC_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
