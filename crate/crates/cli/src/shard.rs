//! Deterministic sharded execution: shard `i` always runs with seed `seed + i`
//! and results are returned in shard order, whatever the thread count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "CROFTON_THREADS";

/// Worker threads: `CROFTON_THREADS` when set to a positive integer,
/// otherwise the available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Splits `total` into `shards` near-equal parts, larger parts first.
pub fn split(total: u64, shards: usize) -> Vec<u64> {
    let s = shards as u64;
    (0..s)
        .map(|i| total / s + u64::from(i < total % s))
        .collect()
}

/// Runs `job(i, seed + i)` for every shard on up to `threads` workers.
pub fn run_shards<T, E, F>(shards: usize, seed: u64, threads: usize, job: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize, u64) -> Result<T, E> + Sync,
{
    let slots: Vec<Mutex<Option<Result<T, E>>>> = (0..shards).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= shards {
            break;
        }
        let r = job(i, seed.wrapping_add(i as u64));
        *slots[i].lock().expect("unpoisoned") = Some(r);
    };
    let workers = threads.clamp(1, shards.max(1));
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .expect("unpoisoned")
                .expect("every shard ran")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_covers_total() {
        assert_eq!(split(10, 4), vec![3, 3, 2, 2]);
        assert_eq!(split(3, 4), vec![1, 1, 1, 0]);
        assert_eq!(split(8, 1), vec![8]);
    }

    #[test]
    fn order_and_seeds_do_not_depend_on_threads() {
        let job = |i: usize, s: u64| -> Result<(usize, u64), ()> { Ok((i, s)) };
        let one = run_shards(7, u64::MAX - 2, 1, job).unwrap();
        let many = run_shards(7, u64::MAX - 2, 5, job).unwrap();
        assert_eq!(one, many);
        assert_eq!(one[3], (3, 0));
    }

    #[test]
    fn first_error_in_shard_order() {
        let r: Result<Vec<u64>, usize> =
            run_shards(6, 0, 3, |i, _| if i % 2 == 1 { Err(i) } else { Ok(0) });
        assert_eq!(r.unwrap_err(), 1);
    }
}
