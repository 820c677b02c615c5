//! Cross-lingual opinion mining for hotel reviews.
//!
//! The pipeline ingests review exports and pre-parsed dependency trees,
//! selects sentiment keywords by per-class entropy, trains a linear
//! support-vector classifier per language, classifies every sentence, and
//! aggregates what guests praise or fault — top keywords, adjective–noun
//! pairings, and hard/soft attribute splits — per price range.
//!
//! Modules follow the pipeline order:
//!
//! - [`corpus`]: review ingestion, language detection, sentence splitting,
//!   hotel matching, date filtering, price binning.
//! - [`textproc`]: tokenization, the English rule lemmatizer, per-class
//!   term counts.
//! - [`keywords`]: per-class entropy and threshold-based keyword selection.
//! - [`classifier`]: feature vectors, the SVM trainer and its independent
//!   reference optimizer, F1 scoring, cross-validation, grid search.
//! - [`syntax`]: CoNLL-U reading and (adjective, noun) pair extraction.
//! - [`analysis`]: corpus classification, rankings, hard/soft aggregation.
//!
//! Everything is deterministic under a fixed seed: shuffles use seeded
//! ChaCha streams, parallel grid cells merge in grid order, and reports
//! downstream are byte-stable.

pub mod analysis;
pub mod classifier;
pub mod corpus;
pub mod error;
pub mod frac;
pub mod keywords;
pub mod syntax;
pub mod textproc;

pub use analysis::{AttributeLexicon, CountMode, HardSoftSummary, KeywordRanking, PairRanking};
pub use classifier::crossval::{CvResult, GridCell, GridSearchResult};
pub use classifier::{FeatureVector, SvcModel};
pub use corpus::{Language, PriceBin, Review, SentenceRecord, Sentiment};
pub use error::{Error, Result};
pub use frac::Frac;
pub use keywords::{EntropyTable, KeywordSet, Quarters};
pub use syntax::{AspectPair, ParsedSentence, ParsedToken, TagPolicy};
pub use textproc::{Token, Tokenizer};
