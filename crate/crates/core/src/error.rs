//! Error type shared by every module in this crate.
//!
//! Variants distinguish bad input data (malformed files, impossible
//! parameters) from states the pipeline itself must never reach, so callers
//! can map them onto exit codes without string-matching messages.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A record in a line-oriented input file violates its schema.
    #[error("{path}:{line}: {message}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// An input file parsed but produced nothing usable.
    #[error("{path}: no valid records")]
    NoValidRecords { path: PathBuf },

    #[error("price {price} JPY is outside the binnable range [0, {limit})")]
    PriceOutOfRange { price: u32, limit: u32 },

    #[error("cannot split sentences: review {review_id} has unsupported language")]
    UnsupportedLanguage { review_id: String },

    #[error("training data contains only the {label} class")]
    SingleClass { label: &'static str },

    #[error("training data is empty")]
    EmptyTrainingSet,

    #[error("{what} must be positive and finite, got {value}")]
    InvalidParameter { what: &'static str, value: f64 },

    #[error("unknown count mode {value:?}; expected \"tokens\" or \"sentences\"")]
    UnknownCountMode { value: String },

    #[error("predictions ({predictions}) and golds ({golds}) differ in length")]
    LengthMismatch { predictions: usize, golds: usize },

    #[error("feature vector has dimension {vector}, model expects {model}")]
    DimensionMismatch { vector: usize, model: usize },

    #[error("fold count must be at least 2, got {k}")]
    TooFewFolds { k: usize },

    #[error("class {label} has {count} samples, too few to stratify into {k} folds")]
    Stratification {
        label: &'static str,
        count: usize,
        k: usize,
    },

    #[error("{grid} grid is empty")]
    EmptyGrid { grid: &'static str },

    #[error("value {value} is not a multiple of 0.25")]
    NotQuarterStep { value: f64 },

    #[error("CoNLL-U line {line}: {message}")]
    Conllu { line: usize, message: String },

    #[error("pair dump line {line}: {message}")]
    PairFormat { line: usize, message: String },

    #[error("tag policy classes overlap: {tag:?} appears in both {a} and {b}")]
    TagPolicyOverlap {
        tag: String,
        a: &'static str,
        b: &'static str,
    },

    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("training data line {line}: {message}")]
    TrainingFormat { line: usize, message: String },

    #[error("keyword file line {line}: {message}")]
    KeywordFormat { line: usize, message: String },

    #[error("lemma exception table line {line}: {message}")]
    LemmaTable { line: usize, message: String },

    #[error("attribute lexicon line {line}: {message}")]
    LexiconFormat { line: usize, message: String },

    #[error("ranking file line {line}: {message}")]
    RankingFormat { line: usize, message: String },

    #[error("sentence {sentence} has language {found}, model expects {expected}")]
    LanguageMismatch {
        sentence: String,
        expected: &'static str,
        found: &'static str,
    },

    #[error("keyword {keyword:?} is missing from the attribute lexicon")]
    MissingAttribution { keyword: String },

    #[error("cannot aggregate attributes over an empty ranking")]
    EmptyRanking,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
