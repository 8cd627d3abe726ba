//! The per-pair skipgram / hierarchical-softmax update.

use super::cache::NodeCache;
use crate::huffman::{CacheSelection, HuffmanTree};
use crate::model::{Model, SharedMatrix, Sigmoid};

/// Both parameter matrices, shared by all workers.
pub struct SharedModel {
    pub input_vectors: SharedMatrix,
    pub node_weights: SharedMatrix,
}

impl From<Model> for SharedModel {
    fn from(m: Model) -> Self {
        SharedModel {
            input_vectors: m.input_vectors.into(),
            node_weights: m.node_weights.into(),
        }
    }
}

impl SharedModel {
    pub fn into_model(self) -> Model {
        Model {
            input_vectors: self.input_vectors.into_matrix(),
            node_weights: self.node_weights.into_matrix(),
        }
    }

    pub fn snapshot(&self) -> Model {
        Model {
            input_vectors: self.input_vectors.to_matrix(),
            node_weights: self.node_weights.to_matrix(),
        }
    }
}

/// Per-worker scratch space for the update.
pub struct Kernel<S> {
    sigmoid: S,
    context: Vec<f32>,
    hidden: Vec<f32>,
    node: Vec<f32>,
}

#[inline]
fn dot(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `hidden += g * weight; weight += g * context`, reading each weight
/// before it is changed.
#[inline]
fn step(g: f32, weight: &mut [f32], context: &[f32], hidden: &mut [f32]) {
    for ((w, c), h) in weight.iter_mut().zip(context).zip(hidden.iter_mut()) {
        *h += g * *w;
        *w += g * c;
    }
}

impl<S: Sigmoid> Kernel<S> {
    pub fn new(sigmoid: S, dim: usize) -> Self {
        Kernel {
            sigmoid,
            context: vec![0.0; dim],
            hidden: vec![0.0; dim],
            node: vec![0.0; dim],
        }
    }

    /// Trains every context word in `contexts` against the tree path of
    /// `center`.
    #[allow(clippy::too_many_arguments)]
    #[inline]
    pub fn train_center<I>(
        &mut self,
        center: u32,
        contexts: I,
        tree: &HuffmanTree,
        selection: &CacheSelection,
        model: &SharedModel,
        cache: &mut NodeCache,
        alpha: f32,
    ) where
        I: IntoIterator<Item = u32>,
    {
        for context in contexts {
            self.train_pair(center, context, tree, selection, model, cache, alpha);
        }
    }

    /// One (center, context) pair: walk the center word's path, moving
    /// each node weight toward the context vector and accumulating the
    /// context vector's update, which is applied once at the end.
    #[allow(clippy::too_many_arguments)]
    #[inline]
    pub fn train_pair(
        &mut self,
        center: u32,
        context: u32,
        tree: &HuffmanTree,
        selection: &CacheSelection,
        model: &SharedModel,
        cache: &mut NodeCache,
        alpha: f32,
    ) {
        model
            .input_vectors
            .read_row(context as usize, &mut self.context);
        self.hidden.fill(0.0);

        let nodes = tree.path_nodes(center);
        let turns = tree.path_turns(center);
        for (&node, &turn) in nodes.iter().zip(turns) {
            let label = 1.0 - turn as f32;
            match selection.slot(node) {
                Some(slot) => {
                    let weight = cache.acquire(slot, node, &model.node_weights);
                    let f = self.sigmoid.sigmoid(dot(&self.context, weight));
                    let g = (label - f) * alpha;
                    step(g, weight, &self.context, &mut self.hidden);
                }
                None => {
                    model.node_weights.read_row(node as usize, &mut self.node);
                    let f = self.sigmoid.sigmoid(dot(&self.context, &self.node));
                    let g = (label - f) * alpha;
                    step(g, &mut self.node, &self.context, &mut self.hidden);
                    model.node_weights.write_row(node as usize, &self.node);
                }
            }
        }

        model
            .input_vectors
            .add_to_row(context as usize, &self.hidden);
    }
}
