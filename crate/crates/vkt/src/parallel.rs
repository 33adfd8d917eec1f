//! Worker-thread budget and deterministic data-parallel helpers.
//!
//! Heavy loops (FFT row batches, pointwise field kernels) may fan out over a
//! small pool of scoped threads. Every parallel split writes disjoint output
//! chunks computed by pure per-element kernels, so results are bit-identical
//! for any worker count. Reductions are never parallelized; they use a fixed
//! pairwise tree (see `grid::reduce`). The `VKT_THREADS` environment variable
//! caps the worker count; it is read once per process.

use std::sync::OnceLock;

static WORKERS: OnceLock<usize> = OnceLock::new();

/// Number of worker threads compute kernels may use (>= 1).
///
/// Defaults to the machine's available parallelism, capped by `VKT_THREADS`
/// when set to a positive integer.
pub fn workers() -> usize {
    *WORKERS.get_or_init(|| {
        let avail = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        match std::env::var("VKT_THREADS") {
            Ok(s) => match s.trim().parse::<usize>() {
                Ok(n) if n >= 1 => avail.min(n),
                _ => avail,
            },
            Err(_) => avail,
        }
    })
}

/// Run `kernel` over `data` split into contiguous chunks of `chunk_len`
/// elements. The kernel receives the index of the first element of its chunk.
///
/// The chunk geometry depends only on `data.len()` and `chunk_len`, and each
/// chunk is computed independently, so the output does not depend on how many
/// threads execute the chunks.
pub fn for_each_chunk<T, F>(data: &mut [T], chunk_len: usize, kernel: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    let workers = workers();
    if workers <= 1 || data.len() <= chunk_len {
        for (c, chunk) in data.chunks_mut(chunk_len).enumerate() {
            kernel(c * chunk_len, chunk);
        }
        return;
    }
    std::thread::scope(|scope| {
        let mut offset = 0usize;
        let per_worker = data.len().div_ceil(workers).div_ceil(chunk_len) * chunk_len;
        let mut rest = data;
        while !rest.is_empty() {
            let take = per_worker.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            let base = offset;
            let kernel = &kernel;
            scope.spawn(move || {
                for (c, chunk) in head.chunks_mut(chunk_len).enumerate() {
                    kernel(base + c * chunk_len, chunk);
                }
            });
            offset += take;
            rest = tail;
        }
    });
}
