//! word2vec-compatible model files.
//!
//! Both formats start with an ASCII header line `"<words> <dim>\n"`.
//! Text rows are `word v1 v2 ... vD\n`. Binary rows are the word, one
//! space, `dim` little-endian `f32`s and a newline. Only the input
//! vectors are stored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Embeddings, Matrix};
use crate::error::{Error, IoContext, ModelParseError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Binary,
}

pub fn save_text(emb: &Embeddings, path: &Path) -> Result<()> {
    let file = File::create(path).with_path(path)?;
    write_text(emb, &mut BufWriter::new(file)).with_path(path)
}

pub fn save_binary(emb: &Embeddings, path: &Path) -> Result<()> {
    let file = File::create(path).with_path(path)?;
    write_binary(emb, &mut BufWriter::new(file)).with_path(path)
}

pub fn save(emb: &Embeddings, path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Text => save_text(emb, path),
        Format::Binary => save_binary(emb, path),
    }
}

pub fn write_text<W: Write>(emb: &Embeddings, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{} {}", emb.len(), emb.dim())?;
    for (word, row) in emb.words().iter().zip(emb.vectors().iter_rows()) {
        w.write_all(word.as_bytes())?;
        for v in row {
            write!(w, " {v}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_binary<W: Write>(emb: &Embeddings, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{} {}", emb.len(), emb.dim())?;
    for (word, row) in emb.words().iter().zip(emb.vectors().iter_rows()) {
        w.write_all(word.as_bytes())?;
        w.write_all(b" ")?;
        for v in row {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Loads either format, telling them apart by the bytes of the first row.
pub fn load(path: &Path) -> Result<Embeddings> {
    let file = File::open(path).with_path(path)?;
    let mut reader = BufReader::new(file);
    let format = detect_format(&mut reader).map_err(Error::Model)?;
    read(&mut reader, format).map_err(Error::Model)
}

pub fn load_as(path: &Path, format: Format) -> Result<Embeddings> {
    let file = File::open(path).with_path(path)?;
    read(&mut BufReader::new(file), format).map_err(Error::Model)
}

pub fn read<R: BufRead>(reader: &mut R, format: Format) -> Result<Embeddings, ModelParseError> {
    let (words, dim) = read_header(reader)?;
    match format {
        Format::Text => read_text_rows(reader, words, dim),
        Format::Binary => read_binary_rows(reader, words, dim),
    }
}

/// Peeks past the header and first word. A text row continues with
/// characters that can only form decimal numbers; a binary row almost
/// never does across `dim * 4` raw bytes.
fn detect_format<R: BufRead>(reader: &mut R) -> Result<Format, ModelParseError> {
    let buf = reader.fill_buf()?;
    let Some(header_end) = buf.iter().position(|&b| b == b'\n') else {
        // header longer than the buffer or a file without rows
        return Ok(Format::Text);
    };
    let header = std::str::from_utf8(&buf[..header_end])
        .map_err(|_| ModelParseError::MalformedHeader("not ASCII".into()))?;
    let (_, dim) = parse_header(header)?;
    let rest = &buf[header_end + 1..];
    let Some(space) = rest.iter().position(|&b| b == b' ') else {
        return Ok(Format::Text);
    };
    let sample = &rest[space + 1..];
    let sample = &sample[..sample.len().min(dim * 4)];
    let numeric = sample
        .iter()
        .all(|b| b.is_ascii_digit() || b" .-+eE\n\rNnaIif".contains(b));
    Ok(if numeric && !sample.is_empty() {
        Format::Text
    } else {
        Format::Binary
    })
}

fn parse_header(line: &str) -> Result<(usize, usize), ModelParseError> {
    let mut parts = line.split_ascii_whitespace();
    let mut field = |name: &str| -> Result<usize, ModelParseError> {
        parts
            .next()
            .ok_or_else(|| ModelParseError::MalformedHeader(format!("missing {name}")))?
            .parse()
            .map_err(|_| ModelParseError::MalformedHeader(format!("bad {name} in {line:?}")))
    };
    let words = field("word count")?;
    let dim = field("dimension")?;
    if parts.next().is_some() {
        return Err(ModelParseError::MalformedHeader(format!(
            "trailing fields in {line:?}"
        )));
    }
    if dim == 0 {
        return Err(ModelParseError::MalformedHeader("dimension is zero".into()));
    }
    Ok((words, dim))
}

fn read_header<R: BufRead>(reader: &mut R) -> Result<(usize, usize), ModelParseError> {
    let mut line = Vec::new();
    reader.read_until(b'\n', &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(ModelParseError::MalformedHeader("missing header line".into()));
    }
    let line = std::str::from_utf8(&line)
        .map_err(|_| ModelParseError::MalformedHeader("not ASCII".into()))?;
    parse_header(line.trim_end())
}

fn read_text_rows<R: BufRead>(
    reader: &mut R,
    words: usize,
    dim: usize,
) -> Result<Embeddings, ModelParseError> {
    let mut vocab = Vec::with_capacity(words);
    let mut data = Vec::with_capacity(words * dim);
    let mut line = String::new();
    while vocab.len() < words {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Err(ModelParseError::TruncatedRow {
                expected: words,
                found: vocab.len(),
            });
        }
        let mut fields = line.split_ascii_whitespace();
        let Some(word) = fields.next() else {
            continue;
        };
        let row = vocab.len();
        let before = data.len();
        for field in fields {
            let v: f32 = field.parse().map_err(|_| ModelParseError::InvalidNumber {
                row,
                value: field.to_owned(),
            })?;
            data.push(v);
        }
        if data.len() - before != dim {
            return Err(ModelParseError::DimensionMismatch {
                row,
                word: word.to_owned(),
                expected: dim,
                found: data.len() - before,
            });
        }
        vocab.push(word.to_owned());
    }
    Ok(Embeddings::new(vocab, Matrix::from_vec(words, dim, data)))
}

fn read_binary_rows<R: BufRead>(
    reader: &mut R,
    words: usize,
    dim: usize,
) -> Result<Embeddings, ModelParseError> {
    let truncated = |found| ModelParseError::TruncatedRow {
        expected: words,
        found,
    };
    let mut vocab = Vec::with_capacity(words);
    let mut data = Vec::with_capacity(words * dim);
    let mut word = Vec::new();
    let mut raw = vec![0u8; dim * 4];
    for row in 0..words {
        word.clear();
        reader.read_until(b' ', &mut word)?;
        if word.pop() != Some(b' ') {
            return Err(truncated(row));
        }
        // the newline ending the previous row is optional
        let start = word.iter().position(|&b| b != b'\n').unwrap_or(word.len());
        let text = String::from_utf8_lossy(&word[start..]).into_owned();

        if let Err(e) = reader.read_exact(&mut raw) {
            return Err(if e.kind() == std::io::ErrorKind::UnexpectedEof {
                truncated(row)
            } else {
                e.into()
            });
        }
        data.extend(
            raw.chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])),
        );
        vocab.push(text);
    }
    Ok(Embeddings::new(vocab, Matrix::from_vec(words, dim, data)))
}
