use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

/// Words a worker processes between learning-rate refreshes.
pub const ALPHA_REFRESH_WORDS: u64 = 10_000;

/// Lower bound on the learning rate, as a fraction of the initial one.
pub const ALPHA_FLOOR: f32 = 1e-4;

/// Words read by all workers so far, out of `iterations * total_tokens`.
#[derive(Debug)]
pub struct ProgressCounter {
    processed: AtomicU64,
    total: u64,
}

impl ProgressCounter {
    pub fn new(total_words: u64) -> Self {
        ProgressCounter {
            processed: AtomicU64::new(0),
            total: total_words,
        }
    }

    /// Adds `words` and returns the new total.
    pub fn add(&self, words: u64) -> u64 {
        self.processed.fetch_add(words, Ordering::Relaxed) + words
    }

    pub fn processed(&self) -> u64 {
        self.processed.load(Ordering::Relaxed)
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Linear decay from `alpha0`, clamped at `alpha0 * ALPHA_FLOOR`.
pub fn update_alpha(words_processed: u64, total_words: u64, alpha0: f32) -> f32 {
    let remaining = 1.0 - words_processed as f64 / (total_words as f64 + 1.0);
    let alpha = (alpha0 as f64 * remaining) as f32;
    alpha.max(alpha0 * ALPHA_FLOOR)
}

/// Effective half-window: `window - b` for `b` uniform in `[0, window)`.
#[inline]
pub fn shrink_window<R: Rng + ?Sized>(window: usize, rng: &mut R) -> usize {
    window - rng.gen_range(0..window)
}
