//! Deterministic work distribution.
//!
//! With the `parallel` feature (default) the mappers fan out over the rayon
//! global pool; without it they run sequentially with identical results.
//! Reductions that feed reported numbers always go through [`pairwise_sum`]
//! on a caller-sorted slice, so output bytes do not depend on thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to every item, preserving input order in the output.
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential twin of [`map_collect`]; exists so benches can compare the two
/// on one build.
pub fn map_collect_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Pairwise (cascade) summation: O(log n) error growth and a fixed
/// association order, so the result is reproducible for a given slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Cap the global rayon pool from the `THERMOPLATE_THREADS` environment
/// variable. Only the first call can take effect; later calls are no-ops,
/// as are calls after the pool has already been used. Without the
/// `parallel` feature this does nothing.
pub fn init_thread_cap_from_env() {
    #[cfg(feature = "parallel")]
    {
        static ONCE: std::sync::Once = std::sync::Once::new();
        ONCE.call_once(|| {
            if let Some(threads) = std::env::var("THERMOPLATE_THREADS")
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&k| k >= 1)
            {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_exact_integer_sum() {
        let xs: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[3.5]), 3.5);
    }

    #[test]
    fn pairwise_sum_close_to_naive_on_mixed_magnitudes() {
        // Deterministic pseudo-random magnitudes spanning ten orders.
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let xs: Vec<f64> = (0..10_000)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let u = (state >> 11) as f64 / (1u64 << 53) as f64;
                (u - 0.5) * 10f64.powi((state % 10) as i32)
            })
            .collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() <= 1e-9 * naive.abs().max(1.0));
    }

    #[test]
    fn mappers_preserve_order_and_agree() {
        let items: Vec<f64> = (0..257).map(|k| k as f64 * 0.1).collect();
        let par = map_collect(&items, |x| x * x);
        let seq = map_collect_seq(&items, |x| x * x);
        assert_eq!(par, seq);
        assert_eq!(par[10], 1.0 * 1.0);
    }
}
