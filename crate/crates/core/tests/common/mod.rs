#![allow(dead_code)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lowercase pseudo-words with a rough English length distribution.
fn make_words(n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    const CONSONANTS: &[u8] = b"bcdfghklmnprstvwz";
    const VOWELS: &[u8] = b"aeiou";
    let mut seen = std::collections::HashSet::new();
    let mut words = Vec::with_capacity(n);
    while words.len() < n {
        let syllables = 1 + (words.len() as f64).log10().max(0.0) as usize / 2 + rng.gen_range(0..2);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())] as char);
            w.push(VOWELS[rng.gen_range(0..VOWELS.len())] as char);
        }
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

/// A Text8-like corpus of `bytes` bytes: one line of single-space
/// separated words drawn from a Zipf(1) distribution over `vocab` types.
pub fn zipf_corpus(bytes: usize, vocab: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = make_words(vocab, &mut rng);
    let weights: Vec<f64> = (1..=vocab).map(|r| 1.0 / r as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut cdf = Vec::with_capacity(vocab);
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cdf.push(acc);
    }

    let mut out = String::with_capacity(bytes + 16);
    while out.len() < bytes {
        let u: f64 = rng.gen();
        let i = cdf.partition_point(|&c| c < u).min(vocab - 1);
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&words[i]);
    }
    out
}

/// Corpus with planted analogies. Every pair `i` has a "country" word
/// `ctyI` and a "capital" word `capI`. Each sentence centers one of them
/// between pair-specific topic words and role-specific filler words, so
/// `v(capI) - v(ctyI)` is roughly the same offset for every pair.
pub struct AnalogyCorpus {
    pub text: String,
    pub questions: String,
    pub pairs: usize,
}

pub fn analogy_corpus(pairs: usize, sentences: usize, seed: u64) -> AnalogyCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topic: Vec<Vec<String>> = (0..pairs)
        .map(|i| (0..6).map(|j| format!("topic{i}x{j}")).collect())
        .collect();
    let role_words = |name: &str| -> Vec<String> { (0..12).map(|j| format!("{name}{j}")).collect() };
    let roles = [role_words("nation"), role_words("urban")];
    let shared: Vec<String> = (0..30).map(|j| format!("common{j}")).collect();

    let mut text = String::new();
    for _ in 0..sentences {
        let i = rng.gen_range(0..pairs);
        let role = rng.gen_range(0..2);
        let center = if role == 0 { format!("cty{i}") } else { format!("cap{i}") };
        let mut ctx: Vec<&str> = Vec::with_capacity(10);
        for _ in 0..4 {
            ctx.push(topic[i].choose(&mut rng).unwrap());
        }
        for _ in 0..4 {
            ctx.push(roles[role].choose(&mut rng).unwrap());
        }
        for _ in 0..2 {
            ctx.push(shared.choose(&mut rng).unwrap());
        }
        ctx.shuffle(&mut rng);
        ctx.insert(5, &center);
        text.push_str(&ctx.join(" "));
        text.push('\n');
    }

    let mut questions = String::from(": capital-planted\n");
    for i in 0..pairs {
        for j in 0..pairs {
            if i != j {
                questions.push_str(&format!("cty{i} cap{i} cty{j} cap{j}\n"));
            }
        }
    }
    AnalogyCorpus {
        text,
        questions,
        pairs,
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    let mut f = fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

/// Location of a Text8 corpus, if one is provided.
pub fn text8_path() -> Option<PathBuf> {
    let candidates = [
        std::env::var_os("SKIPCACHE_TEXT8").map(PathBuf::from),
        Some(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/text8")),
    ];
    candidates.into_iter().flatten().find(|p| p.is_file())
}

pub fn questions_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata/questions-words.txt")
}

/// Largest per-component relative difference, with `|a|, |b|` below
/// `floor` treated as `floor`.
pub fn max_relative_diff(a: &[f32], b: &[f32], floor: f32) -> f32 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f32::max)
}

pub mod oracles;
