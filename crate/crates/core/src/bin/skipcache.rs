use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use skipcache::bench::{self, BenchEval, BenchPlan};
use skipcache::eval::{self, DEFAULT_RESTRICT_TOP};
use skipcache::model::io::{self as model_io, Format};
use skipcache::trainer::{TrainConfig, TrainingSetup};
use skipcache::Embeddings;

#[derive(Parser)]
#[command(
    name = "skipcache",
    version,
    about = "Skipgram / hierarchical softmax word vectors with cached hot tree nodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train word vectors on a plain-text corpus
    Train(TrainArgs),
    /// Score a model on a word analogy question file
    Eval(EvalArgs),
    /// Time training over a grid of worker counts and cache sizes
    Bench(BenchArgs),
}

#[derive(Args)]
struct Hyper {
    /// Set size of word vectors
    #[arg(long = "size", default_value_t = 100)]
    size: usize,

    /// Set max skip length between words
    #[arg(long, default_value_t = 5)]
    window: usize,

    /// Threshold for down-sampling frequent words; 0 disables it
    #[arg(long, default_value_t = 1e-3)]
    sample: f64,

    /// Discard words that appear less than N times
    #[arg(long = "min-count", value_name = "N", default_value_t = 5)]
    min_count: u64,

    /// Training iterations over the corpus
    #[arg(long, default_value_t = 10)]
    iter: usize,

    /// Starting learning rate
    #[arg(long, default_value_t = 0.025)]
    alpha: f32,

    /// Trained center words between cache write-backs
    #[arg(long = "flush-interval", value_name = "U", default_value_t = 10)]
    flush_interval: u64,

    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl Hyper {
    fn config(&self, workers: usize, cache_nodes: usize) -> TrainConfig {
        TrainConfig {
            dim: self.size,
            window: self.window,
            min_count: self.min_count,
            sample: self.sample,
            alpha: self.alpha,
            iterations: self.iter,
            workers,
            cache_nodes,
            flush_interval: self.flush_interval,
            seed: self.seed,
        }
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Args)]
struct TrainArgs {
    /// Use text data from FILE to train the model
    #[arg(long = "train", value_name = "FILE")]
    train: PathBuf,

    /// Save the resulting word vectors to FILE
    #[arg(long = "output", value_name = "FILE")]
    output: PathBuf,

    /// Save the vectors in binary format (`--binary`, `--binary 1`) or text (`--binary 0`)
    #[arg(long, value_name = "0|1", num_args = 0..=1, default_value = "0", default_missing_value = "1")]
    binary: u8,

    /// Also write the vectors in text format to FILE
    #[arg(long = "output-text", value_name = "FILE")]
    output_text: Option<PathBuf>,

    #[arg(long, value_name = "N", default_value_t = default_threads())]
    threads: usize,

    /// Number of most used inner tree nodes each worker caches; 0 disables
    #[arg(long = "cache-nodes", value_name = "K", default_value_t = 31)]
    cache_nodes: usize,

    #[command(flatten)]
    hyper: Hyper,
}

#[derive(Args)]
struct EvalArgs {
    /// Model file in word2vec text or binary format
    #[arg(long, value_name = "FILE")]
    model: PathBuf,

    /// Question file (question-words format)
    #[arg(long, value_name = "FILE")]
    questions: PathBuf,

    /// Only the N most frequent words are used; 0 means all
    #[arg(long = "restrict-top", value_name = "N", default_value_t = DEFAULT_RESTRICT_TOP)]
    restrict_top: usize,

    /// Also write the report as CSV
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long = "train", value_name = "FILE")]
    train: PathBuf,

    /// CSV output file; standard output when omitted
    #[arg(long = "output", value_name = "FILE")]
    output: Option<PathBuf>,

    /// Worker counts to sweep
    #[arg(long = "threads", value_delimiter = ',', default_value = "1,2,4,8")]
    threads: Vec<usize>,

    /// Cache sizes to sweep
    #[arg(long = "cache-nodes", value_delimiter = ',', default_value = "0,1,15,31")]
    cache_nodes: Vec<usize>,

    /// Runs per cell; the median wall time is reported
    #[arg(long, default_value_t = 3)]
    repetitions: usize,

    /// Score each cell's model on these analogy questions
    #[arg(long, value_name = "FILE")]
    questions: Option<PathBuf>,

    #[arg(long = "restrict-top", value_name = "N", default_value_t = DEFAULT_RESTRICT_TOP)]
    restrict_top: usize,

    #[command(flatten)]
    hyper: Hyper,
}

/// Bad flags or inputs, reported with exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if !path.is_file() {
        return Err(usage(format!("{what} {} does not exist", path.display())));
    }
    Ok(())
}

fn require_writable(path: &Path) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(usage(format!(
            "cannot write {}: directory {} does not exist",
            path.display(),
            parent.display()
        )));
    }
    Ok(())
}

fn validated(config: TrainConfig) -> Result<TrainConfig> {
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    require_file(&args.train, "training file")?;
    require_writable(&args.output)?;
    if let Some(p) = &args.output_text {
        require_writable(p)?;
    }
    let format = match args.binary {
        0 => Format::Text,
        1 => Format::Binary,
        other => return Err(usage(format!("--binary must be 0 or 1, got {other}"))),
    };
    let config = validated(args.hyper.config(args.threads, args.cache_nodes))?;

    let start = Instant::now();
    let setup = TrainingSetup::from_corpus(&args.train, &config)?;
    println!(
        "vocab size: {}, words in train file: {}",
        setup.vocab.len(),
        setup.vocab.total_tokens()
    );
    println!(
        "training: {} workers, {} cached nodes, flush every {} words",
        config.workers,
        setup.selection.len(),
        config.flush_interval
    );
    let outcome = setup.train(&args.train, &config)?;
    println!(
        "trained words: {}, training time: {:.2} s, {:.0} words/s",
        outcome.words_processed,
        outcome.elapsed.as_secs_f64(),
        outcome.words_per_second()
    );

    let emb = Embeddings::from_model(&outcome.model, &setup.vocab);
    model_io::save(&emb, &args.output, format)?;
    if let Some(p) = &args.output_text {
        model_io::save_text(&emb, p)?;
    }
    println!("total time: {:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    require_file(&args.model, "model file")?;
    require_file(&args.questions, "question file")?;
    if let Some(p) = &args.csv {
        require_writable(p)?;
    }
    let emb = model_io::load(&args.model)
        .with_context(|| format!("reading {}", args.model.display()))?;
    let questions = eval::load_questions(&args.questions)?;
    let report = eval::evaluate(&emb, &questions, args.restrict_top);
    print!("{report}");
    if let Some(p) = &args.csv {
        let mut w = BufWriter::new(File::create(p).with_context(|| p.display().to_string())?);
        report.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    require_file(&args.train, "training file")?;
    if let Some(p) = &args.output {
        require_writable(p)?;
    }
    let plan = BenchPlan {
        cores: args.threads.clone(),
        cache_nodes: args.cache_nodes.clone(),
        repetitions: args.repetitions,
        config: args.hyper.config(1, 0),
    };
    plan.validate().map_err(|e| usage(e.to_string()))?;

    let questions = match &args.questions {
        Some(p) => {
            require_file(p, "question file")?;
            Some(eval::load_questions(p)?)
        }
        None => None,
    };
    let bench_eval = questions.as_deref().map(|q| BenchEval {
        questions: q,
        restrict_top: args.restrict_top,
    });

    let mut out: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| p.display().to_string())?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "{}", bench::CSV_HEADER)?;
    let mut write_error = None;
    bench::run(&args.train, &plan, bench_eval.as_ref(), |row| {
        if write_error.is_none() {
            write_error = row.write_csv(&mut out).and_then(|_| out.flush()).err();
        }
        eprintln!("{row:?}");
    })?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    Ok(())
}

/// Accepts word2vec-style single-dash long flags (`-train`, `-min-count`)
/// by rewriting them to `--train`, `--min-count`.
fn normalize_args(args: impl IntoIterator<Item = OsString>) -> Vec<OsString> {
    args.into_iter()
        .map(|arg| match arg.to_str() {
            Some(s)
                if s.len() > 2
                    && s.starts_with('-')
                    && !s.starts_with("--")
                    && s[1..].chars().all(|c| c.is_ascii_lowercase() || c == '-') =>
            {
                OsString::from(format!("-{s}"))
            }
            _ => arg,
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize_args(std::env::args_os())) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
