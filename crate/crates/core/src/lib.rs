//! Skipgram word embeddings trained against a hierarchical softmax, with
//! lock-free shared parameters and a per-worker cache for the most
//! frequently updated inner nodes of the Huffman tree.
//!
//! Workers share the word vectors and the inner-node weights without
//! locks. The nodes near the root of the tree are on the path of almost
//! every word, so every worker hits the same few rows constantly. Each
//! worker therefore keeps private copies of the `K` busiest node rows and
//! periodically adds the accumulated change back into shared memory.
//!
//! The pipeline is:
//!
//! 1. [`corpus`]: tokenize, count, build the [`Vocabulary`], shard the input.
//! 2. [`huffman`]: build the tree and pick the cached nodes.
//! 3. [`trainer`]: run the workers and return a [`Model`].
//! 4. [`model::io`] and [`eval`]: persist vectors and score analogies.
//!
//! [`bench`] sweeps worker counts and cache sizes and writes CSV.

pub mod bench;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod huffman;
pub mod model;
pub mod trainer;

pub use corpus::Vocabulary;
pub use error::{Error, ModelParseError, Result};
pub use huffman::{CacheSelection, HuffmanTree};
pub use model::{Embeddings, Model};
pub use trainer::{TrainConfig, TrainOutcome};
