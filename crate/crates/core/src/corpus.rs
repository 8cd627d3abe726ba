//! Plain-text corpus ingestion.
//!
//! Input is flat whitespace-separated text (Text8 style). There is no
//! sentence segmentation, case folding or punctuation handling.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Seek, SeekFrom};
use std::path::Path;

use crate::error::{Error, IoContext, Result};

/// Streams whitespace-separated tokens out of a byte reader without
/// allocating per token.
pub struct TokenScanner<R> {
    reader: R,
    token: Vec<u8>,
}

impl<R: BufRead> TokenScanner<R> {
    pub fn new(reader: R) -> Self {
        TokenScanner {
            reader,
            token: Vec::with_capacity(64),
        }
    }

    /// Returns the next token, or `None` at end of stream.
    pub fn next_token(&mut self) -> io::Result<Option<&[u8]>> {
        self.token.clear();
        loop {
            let buf = match self.reader.fill_buf() {
                Ok(buf) => buf,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e),
            };
            if buf.is_empty() {
                break;
            }

            let mut consumed = 0;
            let mut done = false;
            for &b in buf {
                consumed += 1;
                if b.is_ascii_whitespace() {
                    if !self.token.is_empty() {
                        done = true;
                        break;
                    }
                } else {
                    self.token.push(b);
                }
            }
            self.reader.consume(consumed);
            if done {
                break;
            }
        }

        Ok(if self.token.is_empty() {
            None
        } else {
            Some(&self.token)
        })
    }
}

/// Splits a byte stream on runs of ASCII whitespace.
pub fn tokenize(stream: &[u8]) -> Vec<String> {
    stream
        .split(|b| b.is_ascii_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| String::from_utf8_lossy(t).into_owned())
        .collect()
}

/// Frequency-filtered vocabulary with dense ids in descending count order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Builds a vocabulary from an in-memory token sequence.
    pub fn build<I, S>(tokens: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counter = WordCounter::default();
        for token in tokens {
            counter.add(token.as_ref().as_bytes());
        }
        counter.finish(min_count)
    }

    /// Builds a vocabulary in one streaming pass over a corpus file.
    pub fn from_file(path: &Path, min_count: u64) -> Result<Self> {
        let file = File::open(path).with_path(path)?;
        let mut scanner = TokenScanner::new(BufReader::with_capacity(1 << 20, file));
        let mut counter = WordCounter::default();
        while let Some(token) = scanner.next_token().with_path(path)? {
            counter.add(token);
        }
        counter.finish(min_count)
    }

    /// Rebuilds a vocabulary from `(word, count)` pairs already in id order.
    pub fn from_entries(entries: Vec<(String, u64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::NoTrainableWords);
        }
        let mut words = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (id, (word, count)) in entries.into_iter().enumerate() {
            if count == 0 {
                return Err(Error::InvalidConfig(format!("word {word:?} has zero count")));
            }
            if let Some(&prev) = counts.last() {
                if count > prev {
                    return Err(Error::InvalidConfig(
                        "vocabulary entries must be in non-increasing count order".into(),
                    ));
                }
            }
            if index.insert(word.clone(), id as u32).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate word {word:?}")));
            }
            words.push(word);
            counts.push(count);
        }
        let total_tokens = counts.iter().sum();
        Ok(Vocabulary {
            words,
            counts,
            index,
            total_tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    /// Looks up a raw token. Invalid UTF-8 never matches.
    pub fn id_bytes(&self, token: &[u8]) -> Option<u32> {
        std::str::from_utf8(token).ok().and_then(|w| self.id(w))
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Sum of the counts of all retained words.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }
}

#[derive(Default)]
struct WordCounter {
    // count, position of first occurrence
    counts: HashMap<Vec<u8>, (u64, u64)>,
    position: u64,
}

impl WordCounter {
    fn add(&mut self, token: &[u8]) {
        let position = self.position;
        self.position += 1;
        if let Some(entry) = self.counts.get_mut(token) {
            entry.0 += 1;
        } else {
            self.counts.insert(token.to_vec(), (1, position));
        }
    }

    fn finish(self, min_count: u64) -> Result<Vocabulary> {
        if min_count == 0 {
            return Err(Error::InvalidConfig("min_count must be at least 1".into()));
        }
        let mut entries: Vec<_> = self
            .counts
            .into_iter()
            .filter(|(_, (count, _))| *count >= min_count)
            .collect();
        entries.sort_unstable_by(|(_, (ca, pa)), (_, (cb, pb))| cb.cmp(ca).then(pa.cmp(pb)));
        Vocabulary::from_entries(
            entries
                .into_iter()
                .map(|(word, (count, _))| (String::from_utf8_lossy(&word).into_owned(), count))
                .collect(),
        )
    }
}

/// Probability of keeping one occurrence of a word under frequent-word
/// subsampling with threshold `sample`.
pub fn keep_probability(count: u64, total_tokens: u64, sample: f64) -> f64 {
    debug_assert!(count >= 1 && total_tokens >= count && sample > 0.0);
    let threshold = sample * total_tokens as f64;
    let count = count as f64;
    (((count / threshold).sqrt() + 1.0) * threshold / count).min(1.0)
}

/// Per-word keep probabilities; all ones when subsampling is disabled.
pub fn keep_table(vocab: &Vocabulary, sample: f64) -> Vec<f32> {
    vocab
        .counts()
        .iter()
        .map(|&count| {
            if sample > 0.0 {
                keep_probability(count, vocab.total_tokens(), sample) as f32
            } else {
                1.0
            }
        })
        .collect()
}

/// A byte range of the corpus assigned to one worker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusShard {
    pub byte_start: u64,
    pub byte_end: u64,
}

impl CorpusShard {
    pub fn len(&self) -> u64 {
        self.byte_end - self.byte_start
    }

    pub fn is_empty(&self) -> bool {
        self.byte_end == self.byte_start
    }

    /// Opens a buffered reader over exactly this shard's bytes.
    pub fn open(&self, path: &Path) -> Result<io::Take<BufReader<File>>> {
        let mut file = File::open(path).with_path(path)?;
        file.seek(SeekFrom::Start(self.byte_start)).with_path(path)?;
        Ok(BufReader::with_capacity(1 << 20, file).take(self.len()))
    }
}

/// Splits a corpus file into `num_workers` contiguous shards of roughly
/// equal size, moving each cut forward to the next whitespace byte.
pub fn shard(corpus_path: &Path, num_workers: usize) -> Result<Vec<CorpusShard>> {
    if num_workers == 0 {
        return Err(Error::InvalidConfig("need at least one worker".into()));
    }
    let mut file = File::open(corpus_path).with_path(corpus_path)?;
    let len = file.metadata().with_path(corpus_path)?.len();

    let mut cuts = Vec::with_capacity(num_workers + 1);
    cuts.push(0u64);
    for i in 1..num_workers {
        let target = (len as u128 * i as u128 / num_workers as u128) as u64;
        let prev = *cuts.last().unwrap();
        let cut = if target <= prev {
            prev
        } else {
            next_whitespace(&mut file, target, len).with_path(corpus_path)?
        };
        cuts.push(cut);
    }
    cuts.push(len);

    Ok(cuts
        .windows(2)
        .map(|w| CorpusShard {
            byte_start: w[0],
            byte_end: w[1],
        })
        .collect())
}

/// First offset >= `from` that holds a whitespace byte, or `len`.
fn next_whitespace(file: &mut File, from: u64, len: u64) -> io::Result<u64> {
    file.seek(SeekFrom::Start(from))?;
    let mut reader = BufReader::with_capacity(4096, &mut *file);
    let mut pos = from;
    loop {
        let buf = reader.fill_buf()?;
        if buf.is_empty() {
            return Ok(len);
        }
        if let Some(i) = buf.iter().position(|b| b.is_ascii_whitespace()) {
            return Ok(pos + i as u64);
        }
        let n = buf.len();
        pos += n as u64;
        reader.consume(n);
    }
}
