//! Word-analogy evaluation in the style of word2vec's `compute-accuracy`.
//!
//! A question `a b c d` reads "a is to b as c is to d". The answer is the
//! word whose unit vector has the highest cosine with
//! `v(b) - v(a) + v(c)`, searched over the `restrict_top` most frequent
//! words and never returning `a`, `b` or `c`.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, IoContext, Result};
use crate::model::Embeddings;

/// The customary vocabulary cap of the reference evaluation tool.
pub const DEFAULT_RESTRICT_TOP: usize = 30_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalogyQuestion {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
    pub section: String,
}

/// Parses the question-words format: `: name` lines open a section, every
/// other non-blank line holds four words. Words are lowercased.
pub fn parse_questions(text: &str, path: &Path) -> Result<Vec<AnalogyQuestion>> {
    let mut section = String::new();
    let mut questions = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix(':') {
            section = name.trim().to_owned();
            continue;
        }
        let words: Vec<_> = line.split_whitespace().collect();
        let [a, b, c, d] = words[..] else {
            return Err(Error::Questions {
                path: path.to_owned(),
                line: i + 1,
                message: format!("expected 4 words, found {}", words.len()),
            });
        };
        questions.push(AnalogyQuestion {
            a: a.to_lowercase(),
            b: b.to_lowercase(),
            c: c.to_lowercase(),
            d: d.to_lowercase(),
            section: section.clone(),
        });
    }
    Ok(questions)
}

pub fn load_questions(path: &Path) -> Result<Vec<AnalogyQuestion>> {
    let text = fs::read_to_string(path).with_path(path)?;
    parse_questions(&text, path)
}

/// Unit-normalized copy of the `restrict_top` most frequent vectors.
pub struct AnalogySolver<'a> {
    emb: &'a Embeddings,
    rows: usize,
    dim: usize,
    unit: Vec<f32>,
}

impl<'a> AnalogySolver<'a> {
    /// `restrict_top = 0` searches the whole vocabulary.
    pub fn new(emb: &'a Embeddings, restrict_top: usize) -> Self {
        let rows = if restrict_top == 0 {
            emb.len()
        } else {
            restrict_top.min(emb.len())
        };
        let dim = emb.dim();
        let mut unit = emb.vectors().as_slice()[..rows * dim].to_vec();
        for row in unit.chunks_exact_mut(dim) {
            normalize(row);
        }
        AnalogySolver {
            emb,
            rows,
            dim,
            unit,
        }
    }

    /// Id of `word` if it lies within the search cap.
    pub fn id(&self, word: &str) -> Option<usize> {
        self.emb.id(word).filter(|&i| i < self.rows)
    }

    /// Best id for `a : b :: c : ?`. Ties go to the lower id.
    pub fn answer_ids(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        let row = |i: usize| &self.unit[i * self.dim..(i + 1) * self.dim];
        let mut target: Vec<f32> = row(b)
            .iter()
            .zip(row(a))
            .zip(row(c))
            .map(|((vb, va), vc)| vb - va + vc)
            .collect();
        normalize(&mut target);

        let mut best: Option<(usize, f32)> = None;
        for (i, v) in self.unit.chunks_exact(self.dim).enumerate() {
            if i == a || i == b || i == c {
                continue;
            }
            let score: f32 = v.iter().zip(&target).map(|(x, y)| x * y).sum();
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn answer(&self, a: &str, b: &str, c: &str) -> Option<&'a str> {
        let ids = (self.id(a)?, self.id(b)?, self.id(c)?);
        self.answer_ids(ids.0, ids.1, ids.2)
            .map(|i| self.emb.words()[i].as_str())
    }
}

fn normalize(v: &mut [f32]) {
    let norm = v.iter().map(|x| x * x).sum::<f32>().sqrt();
    if norm > 0.0 {
        for x in v {
            *x /= norm;
        }
    }
}

/// Answers one question without a prebuilt solver. Returns `None` when
/// `a`, `b` or `c` is outside the capped vocabulary.
pub fn answer_analogy(
    emb: &Embeddings,
    a: &str,
    b: &str,
    c: &str,
    restrict_top: usize,
) -> Option<String> {
    AnalogySolver::new(emb, restrict_top)
        .answer(a, b, c)
        .map(str::to_owned)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SectionScore {
    pub section: String,
    pub attempted: usize,
    pub skipped: usize,
    pub correct: usize,
}

impl SectionScore {
    /// `None` when nothing was attempted.
    pub fn accuracy(&self) -> Option<f64> {
        (self.attempted > 0).then(|| self.correct as f64 / self.attempted as f64)
    }

    fn add(&mut self, other: &SectionScore) {
        self.attempted += other.attempted;
        self.skipped += other.skipped;
        self.correct += other.correct;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccuracyReport {
    pub sections: Vec<SectionScore>,
    pub total: SectionScore,
}

/// Scores every question. A question with any word outside the capped
/// vocabulary, including the expected answer, is skipped.
pub fn evaluate(
    emb: &Embeddings,
    questions: &[AnalogyQuestion],
    restrict_top: usize,
) -> AccuracyReport {
    let solver = AnalogySolver::new(emb, restrict_top);

    // None = skipped, Some(correct)
    let outcomes: Vec<Option<bool>> = questions
        .par_iter()
        .map(|q| {
            let a = solver.id(&q.a)?;
            let b = solver.id(&q.b)?;
            let c = solver.id(&q.c)?;
            let d = solver.id(&q.d)?;
            Some(solver.answer_ids(a, b, c) == Some(d))
        })
        .collect();

    let mut sections: Vec<SectionScore> = Vec::new();
    for (q, outcome) in questions.iter().zip(outcomes) {
        if sections.last().is_none_or(|s| s.section != q.section) {
            sections.push(SectionScore {
                section: q.section.clone(),
                ..Default::default()
            });
        }
        let s = sections.last_mut().unwrap();
        match outcome {
            None => s.skipped += 1,
            Some(hit) => {
                s.attempted += 1;
                s.correct += hit as usize;
            }
        }
    }

    let mut total = SectionScore {
        section: "total".into(),
        ..Default::default()
    };
    for s in &sections {
        total.add(s);
    }
    AccuracyReport { sections, total }
}

fn percent(acc: Option<f64>) -> String {
    acc.map_or_else(|| "n/a".into(), |a| format!("{:.2} %", a * 100.0))
}

impl fmt::Display for AccuracyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.sections.iter().chain(std::iter::once(&self.total)) {
            writeln!(
                f,
                "{:<32} accuracy {:>9}  ({} / {} attempted, {} skipped)",
                format!("{}:", s.section),
                percent(s.accuracy()),
                s.correct,
                s.attempted,
                s.skipped
            )?;
        }
        Ok(())
    }
}

impl AccuracyReport {
    /// CSV with header `section,attempted,skipped,correct,accuracy`; the
    /// last row is the total. Accuracy is a fraction, empty when undefined.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "section,attempted,skipped,correct,accuracy")?;
        for s in self.sections.iter().chain(std::iter::once(&self.total)) {
            let acc = s.accuracy().map_or(String::new(), |a| format!("{a:.6}"));
            writeln!(
                w,
                "{},{},{},{},{}",
                s.section, s.attempted, s.skipped, s.correct, acc
            )?;
        }
        Ok(())
    }
}
