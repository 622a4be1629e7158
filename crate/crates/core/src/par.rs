// SPDX-License-Identifier: Apache-2.0

//! Execution strategy for the data-parallel loops of the census.
//!
//! Every hot loop (the discriminant sieve, real class numbers over stage-2
//! candidates, vetting over parent/radicand pairs) is written once against
//! [`Exec`]. With the `parallel` feature the default strategy fans out over
//! rayon's pool; without it only [`Exec::Sequential`] exists.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Ordered map; output position `i` holds `f(&items[i])`.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
        }
    }

    /// Ordered fallible map. The first error in item order is returned.
    pub fn try_map<T, R, E, F>(self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(&T) -> Result<R, E> + Sync + Send,
    {
        match self {
            Exec::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
        }
    }

    /// Runs `work` on each chunk of `0..len` with a private accumulator and
    /// merges the accumulators with `merge`. Chunks are contiguous index
    /// ranges of roughly `len / pieces` elements.
    pub fn fold_ranges<A, W, M>(self, len: usize, pieces: usize, init: impl Fn() -> A + Sync + Send, work: W, merge: M) -> A
    where
        A: Send,
        W: Fn(&mut A, std::ops::Range<usize>) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let pieces = pieces.max(1);
        let step = len.div_ceil(pieces).max(1);
        let ranges: Vec<std::ops::Range<usize>> = (0..len)
            .step_by(step)
            .map(|lo| lo..(lo + step).min(len))
            .collect();
        match self {
            Exec::Sequential => {
                let _ = &merge;
                let mut acc = init();
                for r in ranges {
                    work(&mut acc, r);
                }
                acc
            }
            #[cfg(feature = "parallel")]
            Exec::Parallel => ranges
                .into_par_iter()
                .fold(&init, |mut acc, r| {
                    work(&mut acc, r);
                    acc
                })
                .reduce(&init, &merge),
        }
    }

    pub fn is_parallel(self) -> bool {
        self != Exec::Sequential
    }
}

/// Caps the width of the global worker pool. Only the first call has effect.
pub fn configure_threads(jobs: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = Exec::Sequential.map(&xs, |x| x * x);
        let def = Exec::default().map(&xs, |x| x * x);
        assert_eq!(seq, def);

        let total = |e: Exec| {
            e.fold_ranges(xs.len(), 7, || 0u64, |acc, r| *acc += xs[r].iter().sum::<u64>(), |a, b| a + b)
        };
        assert_eq!(total(Exec::Sequential), 499_500);
        assert_eq!(total(Exec::default()), 499_500);
    }
}
