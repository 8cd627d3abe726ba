//! Huffman coding of the vocabulary for the hierarchical softmax.
//!
//! Inner nodes are numbered `0..V-1` in merge order, so the root is the
//! last one created (`V - 2`). A word's path lists the inner nodes from the
//! root down to its leaf, together with the turn bit taken at each node:
//! 0 toward the first child merged into that node, 1 toward the second.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct HuffmanTree {
    inner_count: usize,
    // flattened per-word paths, root first
    offsets: Vec<u32>,
    nodes: Vec<u32>,
    turns: Vec<u8>,
    usage: Vec<u64>,
}

impl HuffmanTree {
    pub fn build(vocab: &Vocabulary) -> Result<Self> {
        Self::from_counts(vocab.counts())
    }

    /// Builds the tree by repeatedly merging the two lowest-count nodes.
    /// Equal counts are resolved by the lower node id, where leaves come
    /// before inner nodes and inner nodes are ordered by creation.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let leaves = counts.len();
        match leaves {
            0 => return Err(Error::NoTrainableWords),
            1 => return Err(Error::SingleWord),
            _ => {}
        }
        let inner_count = leaves - 1;

        // combined id space: leaves 0..V, inner node k at V + k
        let mut parent = vec![0u32; leaves + inner_count];
        let mut turn = vec![0u8; leaves + inner_count];
        let mut usage = Vec::with_capacity(inner_count);

        let mut heap: BinaryHeap<Reverse<(u64, u32)>> = counts
            .iter()
            .enumerate()
            .map(|(id, &c)| Reverse((c, id as u32)))
            .collect();

        for k in 0..inner_count {
            let Reverse((c1, first)) = heap.pop().expect("heap has two entries");
            let Reverse((c2, second)) = heap.pop().expect("heap has two entries");
            parent[first as usize] = k as u32;
            parent[second as usize] = k as u32;
            turn[first as usize] = 0;
            turn[second as usize] = 1;
            usage.push(c1 + c2);
            heap.push(Reverse((c1 + c2, (leaves + k) as u32)));
        }

        let root = (inner_count - 1) as u32;
        let mut offsets = Vec::with_capacity(leaves + 1);
        let mut nodes = Vec::new();
        let mut turns = Vec::new();
        let mut scratch = Vec::new();
        offsets.push(0);
        for leaf in 0..leaves {
            scratch.clear();
            let mut at = leaf;
            loop {
                let k = parent[at];
                scratch.push((k, turn[at]));
                if k == root {
                    break;
                }
                at = leaves + k as usize;
            }
            for &(k, t) in scratch.iter().rev() {
                nodes.push(k);
                turns.push(t);
            }
            offsets.push(nodes.len() as u32);
        }

        Ok(HuffmanTree {
            inner_count,
            offsets,
            nodes,
            turns,
            usage,
        })
    }

    /// Number of inner nodes, `V - 1`.
    pub fn inner_count(&self) -> usize {
        self.inner_count
    }

    pub fn leaf_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn root(&self) -> u32 {
        (self.inner_count - 1) as u32
    }

    /// Inner nodes on the path of `word`, root first.
    #[inline]
    pub fn path_nodes(&self, word: u32) -> &[u32] {
        let (a, b) = self.range(word);
        &self.nodes[a..b]
    }

    /// Turn bits on the path of `word`, aligned with [`Self::path_nodes`].
    #[inline]
    pub fn path_turns(&self, word: u32) -> &[u8] {
        let (a, b) = self.range(word);
        &self.turns[a..b]
    }

    pub fn path(&self, word: u32) -> impl Iterator<Item = (u32, u8)> + '_ {
        self.path_nodes(word)
            .iter()
            .copied()
            .zip(self.path_turns(word).iter().copied())
    }

    pub fn path_len(&self, word: u32) -> usize {
        let (a, b) = self.range(word);
        b - a
    }

    /// Summed count of all leaves below each inner node: the number of
    /// training updates that touch the node per pass over the corpus.
    pub fn node_usage(&self) -> &[u64] {
        &self.usage
    }

    /// Sum over words of `count * path length`.
    pub fn weighted_path_length(&self, counts: &[u64]) -> u64 {
        counts
            .iter()
            .enumerate()
            .map(|(w, &c)| c * self.path_len(w as u32) as u64)
            .sum()
    }

    #[inline]
    fn range(&self, word: u32) -> (usize, usize) {
        let w = word as usize;
        (self.offsets[w] as usize, self.offsets[w + 1] as usize)
    }
}

const NOT_HOT: u32 = u32::MAX;

/// The inner nodes each worker keeps a private copy of.
#[derive(Clone, Debug)]
pub struct CacheSelection {
    hot_nodes: Vec<u32>,
    slot_of: Vec<u32>,
}

impl CacheSelection {
    /// Picks the `min(k, V-1)` inner nodes with the highest usage, lower
    /// node id first among equals. `k = 0` disables caching.
    pub fn select(tree: &HuffmanTree, k: usize) -> Self {
        let usage = tree.node_usage();
        let mut ranked: Vec<u32> = (0..tree.inner_count() as u32).collect();
        ranked.sort_unstable_by(|&a, &b| {
            usage[b as usize]
                .cmp(&usage[a as usize])
                .then(a.cmp(&b))
        });
        ranked.truncate(k.min(tree.inner_count()));

        let mut slot_of = vec![NOT_HOT; tree.inner_count()];
        for (slot, &node) in ranked.iter().enumerate() {
            slot_of[node as usize] = slot as u32;
        }
        CacheSelection {
            hot_nodes: ranked,
            slot_of,
        }
    }

    pub fn none(tree: &HuffmanTree) -> Self {
        Self::select(tree, 0)
    }

    /// Selected nodes in rank order; index = cache slot.
    pub fn hot_nodes(&self) -> &[u32] {
        &self.hot_nodes
    }

    pub fn len(&self) -> usize {
        self.hot_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hot_nodes.is_empty()
    }

    #[inline]
    pub fn slot(&self, node: u32) -> Option<usize> {
        match self.slot_of.get(node as usize) {
            Some(&s) if s != NOT_HOT => Some(s as usize),
            _ => None,
        }
    }

    #[inline]
    pub fn is_hot(&self, node: u32) -> bool {
        self.slot(node).is_some()
    }
}
