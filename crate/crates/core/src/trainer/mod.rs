//! Parallel training.
//!
//! Each worker owns one shard of the corpus, one [`NodeCache`] and its own
//! RNG. Word vectors and node weights are shared without locks; the only
//! other shared state is the [`ProgressCounter`] driving the learning rate.

mod cache;
mod kernel;
mod schedule;

use std::path::Path;
use std::thread;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{self, CorpusShard, TokenScanner, Vocabulary};
use crate::error::{Error, IoContext, Result};
use crate::huffman::{CacheSelection, HuffmanTree};
use crate::model::{Model, SigmoidTable};

pub use self::cache::NodeCache;
pub use self::kernel::{Kernel, SharedModel};
pub use self::schedule::{
    shrink_window, update_alpha, ProgressCounter, ALPHA_FLOOR, ALPHA_REFRESH_WORDS,
};

/// Longest run of words trained as one unit; windows never cross it.
pub const MAX_SENTENCE: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub min_count: u64,
    /// Subsampling threshold; 0 disables subsampling.
    pub sample: f64,
    pub alpha: f32,
    pub iterations: usize,
    pub workers: usize,
    /// Number of hot inner nodes each worker caches; 0 disables the cache.
    pub cache_nodes: usize,
    /// Trained center words between cache flushes.
    pub flush_interval: u64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 5,
            min_count: 5,
            sample: 1e-3,
            alpha: 0.025,
            iterations: 10,
            workers: thread::available_parallelism().map_or(1, |n| n.get()),
            cache_nodes: 31,
            flush_interval: 10,
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if self.dim == 0 {
            return bad("dimension must be positive");
        }
        if self.window == 0 {
            return bad("window must be positive");
        }
        if self.min_count == 0 {
            return bad("min_count must be positive");
        }
        if !(self.sample >= 0.0 && self.sample.is_finite()) {
            return bad("sample must be a finite non-negative number");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if self.iterations == 0 {
            return bad("iterations must be positive");
        }
        if self.workers == 0 {
            return bad("workers must be positive");
        }
        if self.flush_interval == 0 {
            return bad("flush interval must be at least 1");
        }
        Ok(())
    }
}

/// Vocabulary, tree and cache selection for one corpus and config.
#[derive(Clone, Debug)]
pub struct TrainingSetup {
    pub vocab: Vocabulary,
    pub tree: HuffmanTree,
    pub selection: CacheSelection,
}

impl TrainingSetup {
    pub fn from_corpus(corpus_path: &Path, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        let vocab = Vocabulary::from_file(corpus_path, config.min_count)?;
        Self::from_vocab(vocab, config.cache_nodes)
    }

    pub fn from_vocab(vocab: Vocabulary, cache_nodes: usize) -> Result<Self> {
        let tree = HuffmanTree::build(&vocab)?;
        let selection = CacheSelection::select(&tree, cache_nodes);
        Ok(TrainingSetup {
            vocab,
            tree,
            selection,
        })
    }

    pub fn with_cache_nodes(&self, cache_nodes: usize) -> Self {
        TrainingSetup {
            vocab: self.vocab.clone(),
            tree: self.tree.clone(),
            selection: CacheSelection::select(&self.tree, cache_nodes),
        }
    }

    pub fn train(&self, corpus_path: &Path, config: &TrainConfig) -> Result<TrainOutcome> {
        train(corpus_path, &self.vocab, &self.tree, &self.selection, config)
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: Model,
    /// In-vocabulary words read, before subsampling, over all iterations.
    pub words_processed: u64,
    /// Center words that survived subsampling and were trained.
    pub centers_trained: u64,
    pub elapsed: Duration,
}

impl TrainOutcome {
    pub fn words_per_second(&self) -> f64 {
        self.words_processed as f64 / self.elapsed.as_secs_f64().max(f64::MIN_POSITIVE)
    }
}

struct Shared<'a> {
    corpus_path: &'a Path,
    vocab: &'a Vocabulary,
    tree: &'a HuffmanTree,
    selection: &'a CacheSelection,
    config: &'a TrainConfig,
    keep: Vec<f32>,
    sigmoid: SigmoidTable,
    model: SharedModel,
    progress: ProgressCounter,
}

#[derive(Default)]
struct WorkerStats {
    words: u64,
    centers: u64,
}

/// Trains a fresh model on `corpus_path` with `config.workers` threads.
/// `selection` decides which nodes are cached; `config.cache_nodes` is
/// not consulted here.
pub fn train(
    corpus_path: &Path,
    vocab: &Vocabulary,
    tree: &HuffmanTree,
    selection: &CacheSelection,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if tree.leaf_count() != vocab.len() {
        return Err(Error::InvalidConfig(format!(
            "tree has {} leaves but vocabulary has {} words",
            tree.leaf_count(),
            vocab.len()
        )));
    }
    if selection.hot_nodes().iter().any(|&n| n as usize >= tree.inner_count()) {
        return Err(Error::InvalidConfig(
            "cache selection does not belong to this tree".into(),
        ));
    }

    let shards = corpus::shard(corpus_path, config.workers)?;
    let model = Model::init(vocab.len(), config.dim, config.seed)?;
    let shared = Shared {
        corpus_path,
        vocab,
        tree,
        selection,
        config,
        keep: corpus::keep_table(vocab, config.sample),
        sigmoid: SigmoidTable::new(),
        model: model.into(),
        progress: ProgressCounter::new(config.iterations as u64 * vocab.total_tokens()),
    };

    let start = Instant::now();
    let results: Vec<Result<WorkerStats>> = thread::scope(|scope| {
        let handles: Vec<_> = shards
            .iter()
            .enumerate()
            .map(|(i, shard)| {
                let shared = &shared;
                scope.spawn(move || run_worker(shared, i, *shard))
            })
            .collect();
        handles
            .into_iter()
            .enumerate()
            .map(|(worker, h)| {
                h.join().unwrap_or_else(|payload| {
                    let message = payload
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| payload.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "unknown panic".into());
                    Err(Error::WorkerPanic { worker, message })
                })
            })
            .collect()
    });
    let elapsed = start.elapsed();

    let mut words = 0;
    let mut centers = 0;
    for r in results {
        let s = r?;
        words += s.words;
        centers += s.centers;
    }

    Ok(TrainOutcome {
        model: shared.model.into_model(),
        words_processed: words,
        centers_trained: centers,
        elapsed,
    })
}

fn run_worker(shared: &Shared<'_>, worker: usize, shard: CorpusShard) -> Result<WorkerStats> {
    let config = shared.config;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(worker as u64);

    let mut cache = NodeCache::new(shared.selection.len(), config.dim, config.flush_interval);
    let mut kernel = Kernel::new(&shared.sigmoid, config.dim);
    let mut sentence = Vec::with_capacity(MAX_SENTENCE);
    let mut alpha = config.alpha;
    let mut stats = WorkerStats::default();
    let mut unreported = 0u64;

    for _ in 0..config.iterations {
        let mut scanner = TokenScanner::new(shard.open(shared.corpus_path)?);
        loop {
            sentence.clear();
            let mut exhausted = false;
            while sentence.len() < MAX_SENTENCE {
                let Some(token) = scanner.next_token().with_path(shared.corpus_path)? else {
                    exhausted = true;
                    break;
                };
                let Some(id) = shared.vocab.id_bytes(token) else {
                    continue;
                };
                stats.words += 1;
                unreported += 1;
                let keep = shared.keep[id as usize];
                if keep < 1.0 && rng.gen::<f32>() >= keep {
                    continue;
                }
                sentence.push(id);
            }

            if unreported >= ALPHA_REFRESH_WORDS {
                let done = shared.progress.add(unreported);
                unreported = 0;
                alpha = update_alpha(done, shared.progress.total(), config.alpha);
            }

            train_sentence(shared, &sentence, &mut kernel, &mut cache, &mut rng, alpha);
            stats.centers += sentence.len() as u64;

            if exhausted {
                break;
            }
        }
        cache.flush(&shared.model.node_weights);
    }
    shared.progress.add(unreported);
    Ok(stats)
}

fn train_sentence(
    shared: &Shared<'_>,
    sentence: &[u32],
    kernel: &mut Kernel<&SigmoidTable>,
    cache: &mut NodeCache,
    rng: &mut ChaCha8Rng,
    alpha: f32,
) {
    let window = shared.config.window;
    for (pos, &center) in sentence.iter().enumerate() {
        let half = shrink_window(window, rng);
        let lo = pos.saturating_sub(half);
        let hi = (pos + half).min(sentence.len() - 1);
        let contexts = sentence[lo..pos]
            .iter()
            .chain(&sentence[pos + 1..=hi])
            .copied();
        kernel.train_center(
            center,
            contexts,
            shared.tree,
            shared.selection,
            &shared.model,
            cache,
            alpha,
        );
        cache.center_trained(&shared.model.node_weights);
    }
}
