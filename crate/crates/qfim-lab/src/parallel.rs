//! Tiny fork-join helper for embarrassingly parallel grid evaluations.
//! Worker count is capped by the `QFIM_LAB_THREADS` environment variable.

/// Environment variable capping worker parallelism.
pub const THREADS_ENV: &str = "QFIM_LAB_THREADS";

/// Number of workers to use: `QFIM_LAB_THREADS` if set (minimum 1),
/// otherwise the available parallelism capped at 8.
pub fn worker_count() -> usize {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

/// Map `f` over `items`, preserving order. Falls back to a sequential loop
/// for a single worker or tiny inputs.
pub fn parallel_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let workers = worker_count();
    if workers <= 1 || items.len() < 2 * workers {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let mut out: Vec<Option<U>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    let out_chunks: Vec<&mut [Option<U>]> = out.chunks_mut(chunk).collect();
    std::thread::scope(|scope| {
        for (w, out_slice) in out_chunks.into_iter().enumerate() {
            let start = w * chunk;
            let f = &f;
            scope.spawn(move || {
                for (k, slot) in out_slice.iter_mut().enumerate() {
                    *slot = Some(f(&items[start + k]));
                }
            });
        }
    });
    out.into_iter()
        .map(|v| v.expect("all slots filled"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<usize> = (0..103).collect();
        let squares = parallel_map(&items, |&x| x * x);
        for (i, s) in squares.iter().enumerate() {
            assert_eq!(*s, i * i);
        }
    }
}
