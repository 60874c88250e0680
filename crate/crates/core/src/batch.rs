//! Runs independent batches sequentially or on a small thread pool while
//! emitting their results in batch order, so output stays deterministic.

use rayon::prelude::*;

pub(crate) fn run_batches<B, S, T>(
    threads: usize,
    batches: impl Iterator<Item = B>,
    init: impl Fn() -> S + Sync + Send,
    process: impl Fn(&mut S, B) -> T + Sync + Send,
    mut emit: impl FnMut(T),
) where
    B: Send,
    T: Send,
{
    if threads == 0 {
        let mut scratch = init();
        for b in batches {
            emit(process(&mut scratch, b));
        }
        return;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let mut batches = batches.peekable();
    // At most `threads` batch results are alive at once.
    while batches.peek().is_some() {
        let chunk: Vec<B> = batches.by_ref().take(threads).collect();
        let results: Vec<T> = pool.install(|| {
            chunk
                .into_par_iter()
                .map_init(&init, |s, b| process(s, b))
                .collect()
        });
        results.into_iter().for_each(&mut emit);
    }
}

/// Splits `total` work items into consecutive ranges of at most `size`.
pub(crate) fn ranges(total: u64, size: u64) -> impl Iterator<Item = (u64, u64)> {
    let size = size.max(1);
    (0..total.div_ceil(size)).map(move |b| (b * size, ((b + 1) * size).min(total)))
}
