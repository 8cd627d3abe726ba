use crate::model::SharedMatrix;

/// A worker's private copies of the hot inner-node weight rows.
///
/// A row is copied out of shared memory on first use after a flush, and a
/// snapshot of that copy is kept. Flushing adds `working - snapshot` to the
/// shared row, so the changes made by different workers in the meantime
/// are summed instead of overwritten.
pub struct NodeCache {
    dim: usize,
    cached: Vec<bool>,
    working: Vec<f32>,
    original: Vec<f32>,
    // (slot, node) for every row acquired since the last flush
    active: Vec<(usize, u32)>,
    words_since_flush: u64,
    flush_interval: u64,
}

impl NodeCache {
    pub fn new(slots: usize, dim: usize, flush_interval: u64) -> Self {
        assert!(flush_interval >= 1, "flush interval must be at least 1");
        NodeCache {
            dim,
            cached: vec![false; slots],
            working: vec![0.0; slots * dim],
            original: vec![0.0; slots * dim],
            active: Vec::with_capacity(slots),
            words_since_flush: 0,
            flush_interval,
        }
    }

    pub fn slots(&self) -> usize {
        self.cached.len()
    }

    pub fn is_cached(&self, slot: usize) -> bool {
        self.cached[slot]
    }

    pub fn words_since_flush(&self) -> u64 {
        self.words_since_flush
    }

    /// Working copy of `node`, which lives in cache slot `slot`. Copies the
    /// shared row in if the slot is not currently held.
    #[inline]
    pub fn acquire(&mut self, slot: usize, node: u32, shared: &SharedMatrix) -> &mut [f32] {
        let range = slot * self.dim..(slot + 1) * self.dim;
        if !self.cached[slot] {
            shared.read_row(node as usize, &mut self.working[range.clone()]);
            self.original[range.clone()].copy_from_slice(&self.working[range.clone()]);
            self.cached[slot] = true;
            self.active.push((slot, node));
        }
        &mut self.working[range]
    }

    pub fn original(&self, slot: usize) -> &[f32] {
        &self.original[slot * self.dim..(slot + 1) * self.dim]
    }

    pub fn working(&self, slot: usize) -> &[f32] {
        &self.working[slot * self.dim..(slot + 1) * self.dim]
    }

    /// Adds every held row's change since acquisition into shared memory
    /// and releases it.
    pub fn flush(&mut self, shared: &SharedMatrix) {
        for (slot, node) in self.active.drain(..) {
            let range = slot * self.dim..(slot + 1) * self.dim;
            shared.merge_row(node as usize, &self.working[range.clone()], &self.original[range]);
            self.cached[slot] = false;
        }
        self.words_since_flush = 0;
    }

    /// Counts one trained center word and flushes when the interval is up.
    /// Returns whether a flush happened.
    #[inline]
    pub fn center_trained(&mut self, shared: &SharedMatrix) -> bool {
        self.words_since_flush += 1;
        if self.words_since_flush >= self.flush_interval {
            self.flush(shared);
            true
        } else {
            false
        }
    }
}
