//! C interface to the skipcache trainer.
//!
//! Models are opaque `SkcModel` handles released with `skc_model_free`.
//! Every fallible call returns an `SkcStatus`; on failure
//! `skc_last_error` returns a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use skipcache::eval;
use skipcache::model::io::{self as model_io, Format};
use skipcache::trainer::{TrainConfig, TrainingSetup};
use skipcache::{Embeddings, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    NoTrainableWords = 5,
    NotFound = 6,
    Panic = 7,
}

/// Training parameters. Start from `skc_train_config_default`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SkcTrainConfig {
    pub dim: usize,
    pub window: usize,
    pub min_count: u64,
    /// 0 disables subsampling.
    pub sample: f64,
    pub alpha: f32,
    pub iterations: usize,
    pub workers: usize,
    pub cache_nodes: usize,
    pub flush_interval: u64,
    pub seed: u64,
}

impl From<TrainConfig> for SkcTrainConfig {
    fn from(c: TrainConfig) -> Self {
        SkcTrainConfig {
            dim: c.dim,
            window: c.window,
            min_count: c.min_count,
            sample: c.sample,
            alpha: c.alpha,
            iterations: c.iterations,
            workers: c.workers,
            cache_nodes: c.cache_nodes,
            flush_interval: c.flush_interval,
            seed: c.seed,
        }
    }
}

impl From<SkcTrainConfig> for TrainConfig {
    fn from(c: SkcTrainConfig) -> Self {
        TrainConfig {
            dim: c.dim,
            window: c.window,
            min_count: c.min_count,
            sample: c.sample,
            alpha: c.alpha,
            iterations: c.iterations,
            workers: c.workers,
            cache_nodes: c.cache_nodes,
            flush_interval: c.flush_interval,
            seed: c.seed,
        }
    }
}

/// Totals of an analogy evaluation. `accuracy` is negative when no
/// question was attempted.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SkcAccuracy {
    pub attempted: usize,
    pub skipped: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Trained or loaded word vectors.
pub struct SkcModel {
    embeddings: Embeddings,
    words: Vec<CString>,
}

impl SkcModel {
    fn new(embeddings: Embeddings) -> Box<Self> {
        let words = embeddings
            .words()
            .iter()
            .map(|w| CString::new(w.replace('\0', "")).unwrap_or_default())
            .collect();
        Box::new(SkcModel { embeddings, words })
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(SkcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => SkcStatus::Io,
            Error::NoTrainableWords | Error::SingleWord => SkcStatus::NoTrainableWords,
            Error::InvalidConfig(_) => SkcStatus::InvalidArgument,
            Error::Model(_) | Error::Questions { .. } => SkcStatus::Parse,
            Error::WorkerPanic { .. } => SkcStatus::Panic,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: SkcStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SkcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SkcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            SkcStatus::Panic
        }
    }
}

unsafe fn path_arg(p: *const c_char, name: &str) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return fail(SkcStatus::NullArgument, format!("{name} is null"));
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => fail(SkcStatus::InvalidArgument, format!("{name} is not UTF-8")),
    }
}

unsafe fn model_arg<'a>(m: *const SkcModel) -> Result<&'a SkcModel, Failure> {
    m.as_ref()
        .ok_or_else(|| Failure(SkcStatus::NullArgument, "model is null".into()))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn skc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn skc_train_config_default() -> SkcTrainConfig {
    TrainConfig::default().into()
}

/// Trains on the corpus at `corpus_path` and stores a new model in `*out`.
///
/// # Safety
/// `corpus_path` must be a NUL-terminated string, `config` and `out`
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn skc_train(
    corpus_path: *const c_char,
    config: *const SkcTrainConfig,
    out: *mut *mut SkcModel,
) -> SkcStatus {
    guard(|| {
        let path = path_arg(corpus_path, "corpus_path")?;
        let Some(config) = config.as_ref() else {
            return fail(SkcStatus::NullArgument, "config is null");
        };
        if out.is_null() {
            return fail(SkcStatus::NullArgument, "out is null");
        }
        let config = TrainConfig::from(*config);
        let setup = TrainingSetup::from_corpus(&path, &config)?;
        let outcome = setup.train(&path, &config)?;
        let model = SkcModel::new(Embeddings::from_model(&outcome.model, &setup.vocab));
        *out = Box::into_raw(model);
        Ok(())
    })
}

/// Loads a text or binary model file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skc_model_load(path: *const c_char, out: *mut *mut SkcModel) -> SkcStatus {
    guard(|| {
        let path = path_arg(path, "path")?;
        if out.is_null() {
            return fail(SkcStatus::NullArgument, "out is null");
        }
        *out = Box::into_raw(SkcModel::new(model_io::load(&path)?));
        Ok(())
    })
}

/// Saves in binary format when `binary` is non-zero, text otherwise.
///
/// # Safety
/// `model` must come from this library and `path` be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn skc_model_save(
    model: *const SkcModel,
    path: *const c_char,
    binary: i32,
) -> SkcStatus {
    guard(|| {
        let model = model_arg(model)?;
        let path = path_arg(path, "path")?;
        let format = if binary != 0 { Format::Binary } else { Format::Text };
        model_io::save(&model.embeddings, &path, format)?;
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn skc_model_free(model: *mut SkcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of words, 0 for null.
///
/// # Safety
/// `model` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn skc_model_len(model: *const SkcModel) -> usize {
    model.as_ref().map_or(0, |m| m.embeddings.len())
}

/// Vector dimension, 0 for null.
///
/// # Safety
/// `model` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn skc_model_dim(model: *const SkcModel) -> usize {
    model.as_ref().map_or(0, |m| m.embeddings.dim())
}

/// Word with id `index`. The string is owned by the model.
///
/// # Safety
/// `model` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skc_model_word(
    model: *const SkcModel,
    index: usize,
    out: *mut *const c_char,
) -> SkcStatus {
    guard(|| {
        let model = model_arg(model)?;
        if out.is_null() {
            return fail(SkcStatus::NullArgument, "out is null");
        }
        match model.words.get(index) {
            Some(w) => {
                *out = w.as_ptr();
                Ok(())
            }
            None => fail(
                SkcStatus::NotFound,
                format!("index {index} out of range for {} words", model.words.len()),
            ),
        }
    })
}

/// Copies the vector of `word` into `out`, which holds `len` floats.
///
/// # Safety
/// `model` must come from this library, `word` be NUL-terminated and `out`
/// point to `len` writable floats.
#[no_mangle]
pub unsafe extern "C" fn skc_model_vector(
    model: *const SkcModel,
    word: *const c_char,
    out: *mut f32,
    len: usize,
) -> SkcStatus {
    guard(|| {
        let model = model_arg(model)?;
        if word.is_null() || out.is_null() {
            return fail(SkcStatus::NullArgument, "word or out is null");
        }
        let word = CStr::from_ptr(word).to_string_lossy();
        let Some(v) = model.embeddings.vector(&word) else {
            return fail(SkcStatus::NotFound, format!("{word:?} is not in the vocabulary"));
        };
        if len < v.len() {
            return fail(
                SkcStatus::InvalidArgument,
                format!("buffer holds {len} floats, vector has {}", v.len()),
            );
        }
        std::slice::from_raw_parts_mut(out, v.len()).copy_from_slice(v);
        Ok(())
    })
}

/// Scores the model on a question-words file. `restrict_top = 0` uses the
/// whole vocabulary.
///
/// # Safety
/// `model` must come from this library, `questions_path` be NUL-terminated
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skc_evaluate(
    model: *const SkcModel,
    questions_path: *const c_char,
    restrict_top: usize,
    out: *mut SkcAccuracy,
) -> SkcStatus {
    guard(|| {
        let model = model_arg(model)?;
        let path = path_arg(questions_path, "questions_path")?;
        if out.is_null() {
            return fail(SkcStatus::NullArgument, "out is null");
        }
        let questions = eval::load_questions(&path)?;
        let total = eval::evaluate(&model.embeddings, &questions, restrict_top).total;
        *out = SkcAccuracy {
            attempted: total.attempted,
            skipped: total.skipped,
            correct: total.correct,
            accuracy: total.accuracy().unwrap_or(-1.0),
        };
        Ok(())
    })
}
