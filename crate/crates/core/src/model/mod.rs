//! Parameter storage for the skipgram / hierarchical-softmax model.

pub mod io;
mod shared;
mod sigmoid;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

pub use self::shared::SharedMatrix;
pub use self::sigmoid::{ExactSigmoid, Sigmoid, SigmoidTable, SIGMOID_BOUND, SIGMOID_RESOLUTION};

/// Dense row-major `f32` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Word input vectors (one row per vocabulary word) and inner-node output
/// weights (one row per Huffman inner node).
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub input_vectors: Matrix,
    pub node_weights: Matrix,
}

impl Model {
    /// Input vectors uniform in `[-0.5/dim, 0.5/dim)`, node weights zero.
    pub fn init(vocab_size: usize, dim: usize, seed: u64) -> Result<Self> {
        if vocab_size < 2 {
            return Err(Error::SingleWord);
        }
        if dim == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / dim as f32;
        let data = (0..vocab_size * dim)
            .map(|_| (rng.gen::<f32>() - 0.5) * scale)
            .collect();
        Ok(Model {
            input_vectors: Matrix::from_vec(vocab_size, dim, data),
            node_weights: Matrix::zeros(vocab_size - 1, dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.input_vectors.cols()
    }

    pub fn is_finite(&self) -> bool {
        self.input_vectors.is_finite() && self.node_weights.is_finite()
    }
}

/// Word vectors paired with their words, in vocabulary id order. This is
/// what the model files carry and what analogy evaluation consumes.
#[derive(Clone, Debug, PartialEq)]
pub struct Embeddings {
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Matrix,
}

impl Embeddings {
    pub fn new(words: Vec<String>, vectors: Matrix) -> Self {
        assert_eq!(words.len(), vectors.rows(), "one vector per word");
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            index.entry(w.clone()).or_insert(i);
        }
        Embeddings {
            words,
            index,
            vectors,
        }
    }

    pub fn from_model(model: &Model, vocab: &Vocabulary) -> Self {
        Self::new(vocab.words().to_vec(), model.input_vectors.clone())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn vector(&self, word: &str) -> Option<&[f32]> {
        self.id(word).map(|i| self.vectors.row(i))
    }
}
