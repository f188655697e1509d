//! Data-parallel helpers with a sequential fallback.
//!
//! Reductions always split the index range into fixed-size chunks and combine
//! the partial results in chunk order, so sums are bit-identical whether the
//! `parallel` feature is on, off, or disabled at runtime.

use std::ops::Range;
use std::sync::atomic::{AtomicBool, Ordering};

/// Chunk length used by every reduction.
pub const REDUCE_CHUNK: usize = 4096;

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Disable (or re-enable) the rayon code paths at runtime.
pub fn set_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

fn chunk_ranges(len: usize, chunk: usize) -> Vec<Range<usize>> {
    let chunk = chunk.max(1);
    (0..len.div_ceil(chunk))
        .map(|c| c * chunk..((c + 1) * chunk).min(len))
        .collect()
}

/// Apply `f(chunk_index, chunk)` to consecutive chunks of `data`.
pub fn for_chunks<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// `out[i] = f(i)` for every index.
pub fn fill<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    for_chunks(out, REDUCE_CHUNK, |c, chunk| {
        let base = c * REDUCE_CHUNK;
        for (j, slot) in chunk.iter_mut().enumerate() {
            *slot = f(base + j);
        }
    });
}

/// Evaluate `f` on each index range of a fixed chunking and collect in order.
pub fn map_ranges<R, F>(len: usize, chunk: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
{
    let ranges = chunk_ranges(len, chunk);
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return ranges.into_par_iter().map(f).collect();
    }
    ranges.into_iter().map(f).collect()
}

/// `(0..len).map(f).collect()`, possibly in parallel.
pub fn map_collect<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}

/// Ordered-chunk sum of `f(i)` over `0..len`.
pub fn sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_ranges(len, REDUCE_CHUNK, |r| r.map(&f).sum::<f64>())
        .into_iter()
        .sum()
}

/// Ordered-chunk sum of 3-vectors.
pub fn sum3<F>(len: usize, f: F) -> [f64; 3]
where
    F: Fn(usize) -> [f64; 3] + Sync + Send,
{
    let parts = map_ranges(len, REDUCE_CHUNK, |r| {
        let mut acc = [0.0; 3];
        for i in r {
            let v = f(i);
            acc[0] += v[0];
            acc[1] += v[1];
            acc[2] += v[2];
        }
        acc
    });
    let mut acc = [0.0; 3];
    for p in parts {
        acc[0] += p[0];
        acc[1] += p[1];
        acc[2] += p[2];
    }
    acc
}

/// Maximum of `f(i)` (returns 0 for empty ranges).
pub fn max<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_ranges(len, REDUCE_CHUNK, |r| r.map(&f).fold(0.0_f64, f64::max))
        .into_iter()
        .fold(0.0, f64::max)
}

/// Run two closures, concurrently when parallelism is enabled.
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        return rayon::join(a, b);
    }
    (a(), b())
}

/// Apply `f(i, &mut a[i], &mut b[i])` over two equally long slices.
pub fn for_each_pair<A, B, F>(a: &mut [A], b: &mut [B], f: F)
where
    A: Send,
    B: Send,
    F: Fn(usize, &mut A, &mut B) + Sync + Send,
{
    assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        a.par_iter_mut()
            .zip(b.par_iter_mut())
            .enumerate()
            .with_min_len(REDUCE_CHUNK / 4)
            .for_each(|(i, (x, y))| f(i, x, y));
        return;
    }
    a.iter_mut().zip(b.iter_mut()).enumerate().for_each(|(i, (x, y))| f(i, x, y));
}
