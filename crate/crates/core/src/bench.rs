//! Scaling benchmark: train over a grid of worker counts and cache sizes
//! and record wall time, throughput and optionally analogy accuracy.

use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{self, AnalogyQuestion};
use crate::huffman::CacheSelection;
use crate::model::Embeddings;
use crate::trainer::{TrainConfig, TrainOutcome, TrainingSetup};

pub const CSV_HEADER: &str = "workers,cache_nodes,flush_interval,wall_seconds,words_per_second,accuracy";

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub cores: Vec<usize>,
    pub cache_nodes: Vec<usize>,
    pub repetitions: usize,
    /// Everything except `workers` and `cache_nodes` is taken from here.
    pub config: TrainConfig,
}

impl BenchPlan {
    pub fn validate(&self) -> Result<()> {
        if self.cores.is_empty() || self.cores.contains(&0) {
            return Err(Error::InvalidConfig(
                "worker counts must be a non-empty list of positive numbers".into(),
            ));
        }
        if self.cache_nodes.is_empty() {
            return Err(Error::InvalidConfig("cache size list is empty".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        self.config.validate()
    }

    /// Cells in output order: worker counts outer, cache sizes inner.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cores
            .iter()
            .flat_map(move |&w| self.cache_nodes.iter().map(move |&k| (w, k)))
    }

    pub fn cell_config(&self, workers: usize, cache_nodes: usize) -> TrainConfig {
        TrainConfig {
            workers,
            cache_nodes,
            ..self.config.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub workers: usize,
    pub cache_nodes: usize,
    pub flush_interval: u64,
    /// Median over repetitions.
    pub wall_seconds: f64,
    pub words_per_second: f64,
    pub words_processed: u64,
    pub accuracy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BenchRow {
    Ok(BenchRecord),
    Failed {
        workers: usize,
        cache_nodes: usize,
        flush_interval: u64,
        error: String,
    },
}

impl BenchRow {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        match self {
            BenchRow::Ok(r) => writeln!(
                w,
                "{},{},{},{:.6},{:.1},{}",
                r.workers,
                r.cache_nodes,
                r.flush_interval,
                r.wall_seconds,
                r.words_per_second,
                r.accuracy.map_or(String::new(), |a| format!("{a:.6}"))
            ),
            BenchRow::Failed {
                workers,
                cache_nodes,
                flush_interval,
                error,
            } => {
                let error: String = error
                    .chars()
                    .map(|c| if c == ',' || c == '\n' || c == '\r' { ' ' } else { c })
                    .collect();
                writeln!(w, "{workers},{cache_nodes},{flush_interval},,,error: {error}")
            }
        }
    }
}

/// Analogy questions to score each cell's model on.
pub struct BenchEval<'a> {
    pub questions: &'a [AnalogyQuestion],
    pub restrict_top: usize,
}

/// Runs every cell of `plan` on `corpus_path` strictly one after another.
/// `on_row` sees each row as soon as its cell finishes.
pub fn run(
    corpus_path: &Path,
    plan: &BenchPlan,
    eval: Option<&BenchEval<'_>>,
    on_row: impl FnMut(&BenchRow),
) -> Result<Vec<BenchRow>> {
    plan.validate()?;
    let setup = TrainingSetup::from_corpus(corpus_path, &plan.config)?;
    run_with(plan, &setup, eval, on_row, |config, selection| {
        crate::trainer::train(corpus_path, &setup.vocab, &setup.tree, selection, config)
    })
}

/// Like [`run`] with a caller-supplied training function.
pub fn run_with<F>(
    plan: &BenchPlan,
    setup: &TrainingSetup,
    eval: Option<&BenchEval<'_>>,
    mut on_row: impl FnMut(&BenchRow),
    mut train: F,
) -> Result<Vec<BenchRow>>
where
    F: FnMut(&TrainConfig, &CacheSelection) -> Result<TrainOutcome>,
{
    plan.validate()?;
    let mut rows = Vec::new();
    for (workers, cache_nodes) in plan.cells() {
        let config = plan.cell_config(workers, cache_nodes);
        let selection = CacheSelection::select(&setup.tree, cache_nodes);
        let row = match run_cell(&config, &selection, plan.repetitions, setup, eval, &mut train) {
            Ok(record) => BenchRow::Ok(record),
            Err(e) => BenchRow::Failed {
                workers,
                cache_nodes,
                flush_interval: config.flush_interval,
                error: e.to_string(),
            },
        };
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}

fn run_cell<F>(
    config: &TrainConfig,
    selection: &CacheSelection,
    repetitions: usize,
    setup: &TrainingSetup,
    eval: Option<&BenchEval<'_>>,
    train: &mut F,
) -> Result<BenchRecord>
where
    F: FnMut(&TrainConfig, &CacheSelection) -> Result<TrainOutcome>,
{
    let mut runs = (0..repetitions)
        .map(|_| train(config, selection))
        .collect::<Result<Vec<_>>>()?;
    runs.sort_by_key(|r| r.elapsed);
    let median = runs.swap_remove(runs.len() / 2);

    let wall_seconds = median.elapsed.as_secs_f64().max(1e-9);
    let accuracy = eval.and_then(|e| {
        let emb = Embeddings::from_model(&median.model, &setup.vocab);
        eval::evaluate(&emb, e.questions, e.restrict_top).total.accuracy()
    });
    Ok(BenchRecord {
        workers: config.workers,
        cache_nodes: config.cache_nodes,
        flush_interval: config.flush_interval,
        wall_seconds,
        words_per_second: median.words_processed as f64 / wall_seconds,
        words_processed: median.words_processed,
        accuracy,
    })
}

pub fn write_csv<W: Write>(rows: &[BenchRow], w: &mut W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        row.write_csv(w)?;
    }
    Ok(())
}
