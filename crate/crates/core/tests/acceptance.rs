//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails. Criteria that need the Text8 corpus read it from
//! `$SKIPCACHE_TEXT8` (or `data/text8` at the workspace root) and report
//! UNVERIFIED without it. Set `SKIPCACHE_FULL_ACCURACY=1` to also run the
//! 10-iteration accuracy comparison.

mod common;

use std::fs::{self, File};
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::oracles::{gradient_check, min_weighted_code_length};
use skipcache::eval::{self, load_questions, parse_questions, AnalogyQuestion};
use skipcache::model::io::{self as model_io, Format};
use skipcache::trainer::{TrainConfig, TrainingSetup};
use skipcache::{Embeddings, HuffmanTree, Model, TrainOutcome};

enum Status {
    Pass(String),
    Fail(String),
    Unverified(String),
    NotApplicable(String),
}

fn report(name: &str, status: &Status) {
    let (tag, detail) = match status {
        Status::Pass(d) => ("PASS", d),
        Status::Fail(d) => ("FAIL", d),
        Status::Unverified(d) => ("UNVERIFIED", d),
        Status::NotApplicable(d) => ("NOT APPLICABLE", d),
    };
    println!("{name}: {tag} ({detail})");
}

fn check(ok: bool, detail: String) -> Status {
    if ok {
        Status::Pass(detail)
    } else {
        Status::Fail(detail)
    }
}

fn cores() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn fixture(dir: &Path) -> PathBuf {
    common::write_file(dir, "fixture.txt", &common::zipf_corpus(200_000, 3000, 2024))
}

fn train(path: &Path, config: &TrainConfig) -> (TrainingSetup, TrainOutcome) {
    let setup = TrainingSetup::from_corpus(path, config).expect("vocabulary");
    let out = setup.train(path, config).expect("training");
    (setup, out)
}

fn criterion_1() -> Status {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let vocab = rng.gen_range(2..=16);
        let dim = rng.gen_range(1..=8);
        // alternate between shared-row and cached-row updates
        let cache = if i % 2 == 0 { 0 } else { vocab };
        worst = worst.max(gradient_check(&mut rng, vocab, dim, cache));
    }
    check(worst < 1e-3, format!("50 instances, worst relative error {worst:.2e}"))
}

fn criterion_2() -> Status {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for i in 0..200 {
        let n = rng.gen_range(3..=8);
        // every fourth vocabulary draws from a narrow range to force ties
        let hi = if i % 4 == 0 { 4 } else { 1000 };
        let mut counts: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=hi)).collect();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let tree = HuffmanTree::from_counts(&counts).expect("tree");
        if tree.weighted_path_length(&counts) != min_weighted_code_length(&counts) {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("200 vocabularies, {mismatches} mismatches"))
}

fn max_model_diff(a: &Model, b: &Model) -> f32 {
    let d_in = common::max_relative_diff(a.input_vectors.as_slice(), b.input_vectors.as_slice(), 1e-6);
    let d_node = common::max_relative_diff(a.node_weights.as_slice(), b.node_weights.as_slice(), 1e-6);
    d_in.max(d_node)
}

fn criterion_3(corpus: &Path) -> Status {
    let base = TrainConfig {
        workers: 1,
        ..TrainConfig::default()
    };
    let (_, uncached) = train(corpus, &TrainConfig { cache_nodes: 0, ..base.clone() });
    let (_, u10) = train(corpus, &TrainConfig { cache_nodes: 31, flush_interval: 10, ..base.clone() });
    let (_, u1) = train(corpus, &TrainConfig { cache_nodes: 31, flush_interval: 1, ..base });
    let d10 = max_model_diff(&u10.model, &uncached.model);
    let d1 = max_model_diff(&u1.model, &uncached.model);
    check(
        d10 <= 1e-4 && d1 <= 1e-6,
        format!("max relative difference K=31,u=10: {d10:.2e}; K=31,u=1: {d1:.2e}"),
    )
}

fn accuracy(setup: &TrainingSetup, out: &TrainOutcome, questions: &[AnalogyQuestion], cap: usize) -> f64 {
    let emb = Embeddings::from_model(&out.model, &setup.vocab);
    eval::evaluate(&emb, questions, cap).total.accuracy().unwrap_or(0.0)
}

fn parity(corpus: &Path, questions: &[AnalogyQuestion], config: &TrainConfig, cap: usize) -> (f64, f64) {
    let (setup, uncached) = train(corpus, &TrainConfig { cache_nodes: 0, ..config.clone() });
    let acc0 = accuracy(&setup, &uncached, questions, cap);
    let cached_setup = setup.with_cache_nodes(31);
    let cached = cached_setup
        .train(corpus, &TrainConfig { cache_nodes: 31, ..config.clone() })
        .expect("training");
    (acc0, accuracy(&cached_setup, &cached, questions, cap))
}

fn criterion_4(text8: Option<&Path>, questions: &[AnalogyQuestion]) -> Vec<(String, Status)> {
    let mut out = Vec::new();
    let Some(text8) = text8 else {
        out.push((
            "criterion 4".into(),
            Status::Unverified("Text8 corpus not available; set SKIPCACHE_TEXT8".into()),
        ));
        return out;
    };

    let vocab = TrainingSetup::from_corpus(text8, &TrainConfig::default()).map(|s| s.vocab.len());
    out.push((
        "criterion 4 (Text8 vocabulary)".into(),
        match vocab {
            Ok(n) => check(n == 71290, format!("{n} words at min_count 5, expected 71290")),
            Err(e) => Status::Fail(e.to_string()),
        },
    ));

    let fast = TrainConfig {
        iterations: 1,
        ..TrainConfig::default()
    };
    let (a0, a31) = parity(text8, questions, &fast, eval::DEFAULT_RESTRICT_TOP);
    out.push((
        "criterion 4 (fast, 1 iteration)".into(),
        check(
            a0 >= 0.15 && a31 >= 0.15 && (a0 - a31).abs() < 0.03,
            format!("K=0 {:.2}%, K=31 {:.2}%", a0 * 100.0, a31 * 100.0),
        ),
    ));

    if std::env::var_os("SKIPCACHE_FULL_ACCURACY").is_some() {
        let (a0, a31) = parity(text8, questions, &TrainConfig::default(), eval::DEFAULT_RESTRICT_TOP);
        out.push((
            "criterion 4 (full, 10 iterations)".into(),
            check(
                a0 >= 0.30 && a31 >= 0.30 && (a0 - a31).abs() < 0.015,
                format!("K=0 {:.2}%, K=31 {:.2}%", a0 * 100.0, a31 * 100.0),
            ),
        ));
    } else {
        out.push((
            "criterion 4 (full, 10 iterations)".into(),
            Status::Unverified("set SKIPCACHE_FULL_ACCURACY=1 to run".into()),
        ));
    }
    out
}

/// Cached and uncached accuracy on a corpus with planted analogies. Not a
/// substitute for the Text8 criterion; it exercises the same comparison
/// on a corpus that exists on every host.
fn criterion_4_planted(dir: &Path) -> Status {
    let corpus = common::analogy_corpus(15, 20_000, 4);
    let path = common::write_file(dir, "planted.txt", &corpus.text);
    let questions = parse_questions(&corpus.questions, Path::new("planted")).expect("questions");
    let config = TrainConfig {
        iterations: 1,
        ..TrainConfig::default()
    };
    let (a0, a31) = parity(&path, &questions, &config, 0);
    check(
        a0 >= 0.15 && a31 >= 0.15 && (a0 - a31).abs() < 0.03,
        format!("K=0 {:.2}%, K=31 {:.2}%", a0 * 100.0, a31 * 100.0),
    )
}

fn wall_seconds(corpus: &Path, setup: &TrainingSetup, workers: usize, k: usize) -> f64 {
    let config = TrainConfig {
        iterations: 1,
        workers,
        cache_nodes: k,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    setup.with_cache_nodes(k).train(corpus, &config).expect("training");
    start.elapsed().as_secs_f64()
}

fn criterion_5(text8: Option<&Path>) -> Vec<(String, Status)> {
    let n = cores();
    let Some(text8) = text8 else {
        return vec![(
            "criterion 5".into(),
            Status::Unverified(format!("Text8 corpus not available; host has {n} cores")),
        )];
    };
    if n < 8 {
        return vec![(
            "criterion 5".into(),
            Status::NotApplicable(format!("needs at least 8 cores, host has {n}")),
        )];
    }
    let setup = TrainingSetup::from_corpus(text8, &TrainConfig::default()).expect("vocabulary");
    let mut out = Vec::new();
    let t0 = wall_seconds(text8, &setup, 8, 0);
    let t1 = wall_seconds(text8, &setup, 8, 1);
    let t31 = wall_seconds(text8, &setup, 8, 31);
    out.push((
        "criterion 5 (8 workers)".into(),
        check(
            t31 <= 0.85 * t0 && t1 < t0,
            format!("K=0 {t0:.1}s, K=1 {t1:.1}s, K=31 {t31:.1}s"),
        ),
    ));
    if n >= 16 {
        let t0 = wall_seconds(text8, &setup, 16, 0);
        let t31 = wall_seconds(text8, &setup, 16, 31);
        out.push((
            "criterion 5 (16 workers)".into(),
            check(t31 <= 0.7 * t0, format!("K=0 {t0:.1}s, K=31 {t31:.1}s")),
        ));
    } else {
        out.push((
            "criterion 5 (16 workers)".into(),
            Status::NotApplicable(format!("needs at least 16 cores, host has {n}")),
        ));
    }
    out
}

fn criterion_6(text8: Option<&Path>) -> Status {
    let n = cores();
    let Some(text8) = text8 else {
        return Status::Unverified(format!("Text8 corpus not available; host has {n} cores"));
    };
    let setup = TrainingSetup::from_corpus(text8, &TrainConfig::default()).expect("vocabulary");
    let rate = |workers| {
        let config = TrainConfig {
            iterations: 1,
            workers,
            cache_nodes: 0,
            ..TrainConfig::default()
        };
        setup
            .with_cache_nodes(0)
            .train(text8, &config)
            .expect("training")
            .words_per_second()
    };
    let (r1, r4) = (rate(1), rate(4));
    check(
        r4 >= 1.5 * r1,
        format!("1 worker {r1:.0} words/s, 4 workers {r4:.0} words/s, ratio {:.2}, host has {n} cores", r4 / r1),
    )
}

/// Reads a binary model the way the classic C evaluator does: `%lld %lld`
/// header, then per row a word read byte by byte up to a space (newlines
/// dropped, at most 50 bytes kept) followed by `size` raw floats.
fn reference_reader(path: &Path) -> Result<(Vec<String>, Vec<f32>, usize), String> {
    const MAX_W: usize = 50;
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(|e| e.to_string())?;
    let mut pos = 0;
    let scan_int = |pos: &mut usize| -> Result<usize, String> {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        std::str::from_utf8(&bytes[start..*pos])
            .unwrap()
            .parse()
            .map_err(|_| format!("bad header at byte {start}"))
    };
    let words = scan_int(&mut pos)?;
    let size = scan_int(&mut pos)?;
    let mut vocab = Vec::with_capacity(words);
    let mut data = Vec::with_capacity(words * size);
    for row in 0..words {
        let mut word = Vec::new();
        loop {
            let Some(&c) = bytes.get(pos) else {
                return Err(format!("end of file in word {row}"));
            };
            pos += 1;
            if c == b' ' {
                break;
            }
            if word.len() < MAX_W && c != b'\n' {
                word.push(c);
            }
        }
        let end = pos + 4 * size;
        let raw = bytes.get(pos..end).ok_or(format!("end of file in vector {row}"))?;
        data.extend(raw.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])));
        pos = end;
        vocab.push(String::from_utf8_lossy(&word).into_owned());
    }
    Ok((vocab, data, size))
}

fn conforms(path: &Path, emb: &Embeddings) -> Result<(), String> {
    let (words, data, size) = reference_reader(path)?;
    if size != emb.dim() || words != emb.words() {
        return Err("header or words differ".into());
    }
    let same = data
        .iter()
        .zip(emb.vectors().as_slice())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    if !same || data.len() != emb.vectors().as_slice().len() {
        return Err("vectors differ".into());
    }
    Ok(())
}

fn criterion_7(dir: &Path, corpus: &Path, text8: Option<&Path>) -> Vec<(String, Status)> {
    let config = TrainConfig {
        workers: 1,
        iterations: 1,
        ..TrainConfig::default()
    };
    let (setup, out) = train(corpus, &config);
    let emb = Embeddings::from_model(&out.model, &setup.vocab);
    let path = dir.join("fixture.bin");
    model_io::save(&emb, &path, Format::Binary).expect("save");
    let loaded = model_io::load(&path).expect("load");
    let identical = loaded.words() == emb.words()
        && loaded
            .vectors()
            .as_slice()
            .iter()
            .zip(emb.vectors().as_slice())
            .all(|(a, b)| a.to_bits() == b.to_bits());
    let reader = conforms(&path, &emb);
    let mut lines = vec![(
        "criterion 7 (fixture)".into(),
        check(
            identical && reader.is_ok(),
            format!(
                "save/load bit-identical: {identical}; reference reader: {}",
                reader.err().unwrap_or_else(|| "accepted".into())
            ),
        ),
    )];

    lines.push((
        "criterion 7 (Text8 model)".into(),
        match text8 {
            None => Status::Unverified("Text8 corpus not available".into()),
            Some(text8) => {
                let (setup, out) = train(text8, &config);
                let emb = Embeddings::from_model(&out.model, &setup.vocab);
                let path = dir.join("text8.bin");
                model_io::save(&emb, &path, Format::Binary).expect("save");
                match conforms(&path, &emb) {
                    Ok(()) => Status::Pass(format!("{} words accepted", emb.len())),
                    Err(e) => Status::Fail(e),
                }
            }
        },
    ));
    lines
}

fn criterion_8(dir: &Path, corpus: &Path) -> Status {
    let config = TrainConfig {
        workers: 1,
        iterations: 2,
        seed: 7,
        ..TrainConfig::default()
    };
    let files: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let (setup, out) = train(corpus, &config);
            let path = dir.join(format!("run{i}.bin"));
            model_io::save(&Embeddings::from_model(&out.model, &setup.vocab), &path, Format::Binary)
                .expect("save");
            fs::read(&path).expect("read")
        })
        .collect();
    check(files[0] == files[1], format!("{} bytes per file", files[0].len()))
}

fn main() {
    // `cargo test` passes harness flags such as `--list`; there is
    // nothing to list, so answer and stop.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let dir = tempfile::tempdir().expect("temp dir");
    let corpus = fixture(dir.path());
    let text8 = common::text8_path();
    let questions = load_questions(&common::questions_path()).expect("questions");

    let mut results: Vec<(String, Status)> = Vec::new();
    results.push(("criterion 1".into(), criterion_1()));
    results.push(("criterion 2".into(), criterion_2()));
    results.push(("criterion 3".into(), criterion_3(&corpus)));
    results.extend(criterion_4(text8.as_deref(), &questions));
    results.push(("criterion 4 (planted-analogy corpus)".into(), criterion_4_planted(dir.path())));
    results.extend(criterion_5(text8.as_deref()));
    results.push(("criterion 6".into(), criterion_6(text8.as_deref())));
    results.extend(criterion_7(dir.path(), &corpus, text8.as_deref()));
    results.push(("criterion 8".into(), criterion_8(dir.path(), &corpus)));

    for (name, status) in &results {
        report(name, status);
    }
    let failed = results.iter().filter(|(_, s)| matches!(s, Status::Fail(_))).count();
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
