//! Index-ordered map over independent jobs, run on the rayon pool when the
//! `parallel` feature is on and sequentially otherwise. Results always come
//! back in index order, so reductions over them do not depend on scheduling.

use crate::model::Concurrency;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Serial-only models force sequential execution.
    pub fn honoring(self, concurrency: Concurrency) -> Execution {
        match concurrency {
            Concurrency::SerialOnly => Execution::Sequential,
            Concurrency::ParallelSafe => self,
        }
    }
}

pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = exec;
    (0..n).map(f).collect()
}

/// Like [`map_indexed`] for fallible jobs; the error of the lowest failing
/// index wins, whatever order the jobs finished in.
pub fn try_map_indexed<T, E, F>(n: usize, exec: Execution, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Send + Sync,
{
    map_indexed(n, exec, f).into_iter().collect()
}
