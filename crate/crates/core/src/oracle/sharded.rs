use std::sync::atomic::Ordering;

use rayon::prelude::*;

use super::OracleConfig;
use crate::error::{Error, Result};

/// Row `[a, b, c]` with lexicographic index `a·n² + b·n + c`.
#[inline]
pub(crate) fn decode_row(index: u64, n: u64) -> [u64; 3] {
    [index / (n * n), index / n % n, index % n]
}

fn merge(mut acc: Vec<u64>, part: Vec<u64>) -> Result<Vec<u64>> {
    for (a, b) in acc.iter_mut().zip(part) {
        *a = a.checked_add(b).ok_or(Error::TallyOverflow)?;
    }
    Ok(acc)
}

/// Run `work(shard, tally)` for every shard in `0..shards`, each into a fresh
/// zeroed tally of `width` counters, and return the exact sum of the tallies.
///
/// `units_per_shard` is added to the progress counter as each shard finishes.
pub(crate) fn run_sharded<F>(
    config: &OracleConfig,
    shards: u64,
    width: usize,
    units_per_shard: u64,
    work: F,
) -> Result<Vec<u64>>
where
    F: Fn(u64, &mut [u64]) -> Result<()> + Sync,
{
    let job = || {
        (0..shards)
            .into_par_iter()
            .map(|shard| {
                let mut tally = vec![0u64; width];
                work(shard, &mut tally)?;
                if let Some(progress) = &config.progress {
                    progress.fetch_add(units_per_shard, Ordering::Relaxed);
                }
                Ok(tally)
            })
            .try_reduce(|| vec![0u64; width], merge)
    };
    match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .expect("failed to start worker pool")
            .install(job),
        None => job(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_decode_lexicographically() {
        assert_eq!(decode_row(0, 5), [0, 0, 0]);
        assert_eq!(decode_row(7, 3), [0, 2, 1]);
        assert_eq!(decode_row(26, 3), [2, 2, 2]);
    }

    #[test]
    fn overflow_is_an_error() {
        let config = OracleConfig::default();
        let r = run_sharded(&config, 2, 1, 1, |_, t| {
            t[0] = u64::MAX;
            Ok(())
        });
        assert_eq!(r, Err(Error::TallyOverflow));
    }

    #[test]
    fn sums_shards() {
        let config = OracleConfig::default().with_threads(3);
        let r = run_sharded(&config, 10, 2, 1, |s, t| {
            t[0] = s;
            t[1] = 1;
            Ok(())
        });
        assert_eq!(r, Ok(vec![45, 10]));
    }
}
