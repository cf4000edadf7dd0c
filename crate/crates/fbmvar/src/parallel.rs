//! Replicate fan-out.
//!
//! Paths are drawn in pairs: pair `j` is seeded with `replicate_seed(master, j)`
//! and its real and imaginary parts become replicates `2j` and `2j + 1`. All
//! seeds are fixed before the fan-out, results are collected in replicate
//! order, and reductions run sequentially over that order, so the output
//! does not depend on the number of threads.

use std::ops::Range;

use fbmvar_core::rng::{mix64, replicate_seed};
use fbmvar_core::{CirculantSampler, FbmPath};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// An independent master seed for a named side stream of an experiment.
pub fn substream(master: u64, tag: u64) -> u64 {
    mix64(master ^ mix64(tag.wrapping_add(0x5EED)))
}

/// Apply `f` to each replicate path, in replicate order.
pub fn map_paths<T, F>(sampler: &CirculantSampler, master: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&FbmPath) -> T + Sync,
{
    let pairs = count.div_ceil(2);
    let nested: Vec<(T, Option<T>)> = (0..pairs)
        .into_par_iter()
        .map(|j| {
            let [a, b] = sampler.sample_pair(replicate_seed(master, j as u64));
            let second = (2 * j + 1 < count).then(|| f(&b));
            (f(&a), second)
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    for (a, b) in nested {
        out.push(a);
        out.extend(b);
    }
    out
}

/// Split `0..count` into consecutive chunks of `chunk`, map each in
/// parallel, and return the results in chunk order.
pub fn par_chunks<A, F>(count: usize, chunk: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<usize>) -> A + Sync,
{
    let chunk = chunk.max(1);
    (0..count.div_ceil(chunk))
        .into_par_iter()
        .map(|c| f(c * chunk..((c + 1) * chunk).min(count)))
        .collect()
}

/// Run `f` on a pool of `threads` workers (rayon's default when `None`).
pub fn with_threads<R, F>(threads: Option<usize>, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::circulant_sampler;

    #[test]
    fn replicate_order_is_thread_independent() {
        let s = circulant_sampler(0.6, 5).unwrap();
        let one = with_threads(Some(1), || map_paths(&s, 9, 7, |p| p.terminal())).unwrap();
        let three = with_threads(Some(3), || map_paths(&s, 9, 7, |p| p.terminal())).unwrap();
        assert_eq!(one.len(), 7);
        assert_eq!(one, three);
        let [a, b] = s.sample_pair(replicate_seed(9, 1));
        assert_eq!(one[2], a.terminal());
        assert_eq!(one[3], b.terminal());
    }

    #[test]
    fn chunks_cover_range_in_order() {
        let parts = par_chunks(10, 4, |r| r.collect::<Vec<_>>());
        assert_eq!(parts, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![8, 9]]);
        assert!(with_threads(Some(0), || ()).is_err());
    }
}
