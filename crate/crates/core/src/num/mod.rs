pub mod interp;
pub mod ode;
pub mod quad;
pub mod stats;

/// Map `n` items through `f` with a deterministic, partition-independent
/// result order. Worker count comes from the HOROLAB_THREADS environment
/// variable (default 1); outputs are identical for any setting because
/// items are indexed and reassembled in order.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = std::env::var("HOROLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1);
    if workers == 1 || n < 2 * workers {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (k, s) in slot.iter_mut().enumerate() {
                    *s = Some(f(w * chunk + k));
                }
            });
        }
    });
    out.into_iter().map(|x| x.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn par_map_is_ordered() {
        let v = super::par_map(100, |i| i * i);
        assert_eq!(v[17], 289);
        assert_eq!(v.len(), 100);
    }
}
