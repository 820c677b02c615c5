//! Sentence sentiment classification on keyword-count features.
//!
//! Feature space: the keyword set's positive list followed by its negative
//! list, each lexicographic; a sentence's vector holds the occurrence count
//! of each keyword's lemma. Models are linear SVMs trained by the dual
//! coordinate descent in [`svm`], with a projected-subgradient reference in
//! [`reference`] for independent verification, and serialize to a versioned
//! flat-text format whose f64 fields round-trip exactly.

pub mod crossval;
pub mod reference;
mod svm;

pub use svm::{CONVERGENCE_TOLERANCE, MAX_EPOCHS, TrainStats, primal_objective};

use std::io::{BufRead, Write};

use crate::corpus::{Language, Sentiment};
use crate::error::{Error, Result};
use crate::keywords::{KeywordSet, Quarters};
use crate::textproc::Token;

/// Sparse non-negative count vector over a fixed feature dimension.
/// Entries are sorted by ordinal, unique, and never zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    dim: usize,
    entries: Vec<(usize, u32)>,
}

impl FeatureVector {
    /// Builds a vector, sorting entries, merging duplicate ordinals, and
    /// dropping zero counts. Panics if an ordinal is out of range; callers
    /// construct entries from a keyword set whose dimension they pass here.
    pub fn new(dim: usize, mut entries: Vec<(usize, u32)>) -> FeatureVector {
        entries.sort_unstable();
        let mut merged: Vec<(usize, u32)> = Vec::with_capacity(entries.len());
        for (ordinal, count) in entries {
            assert!(ordinal < dim, "feature ordinal {ordinal} out of range {dim}");
            if count == 0 {
                continue;
            }
            match merged.last_mut() {
                Some((last, total)) if *last == ordinal => *total += count,
                _ => merged.push((ordinal, count)),
            }
        }
        FeatureVector {
            dim,
            entries: merged,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, c)| (c as f64) * (c as f64))
            .sum()
    }
}

/// Counts keyword-lemma occurrences of `tokens` in the set's feature order.
/// A lemma sitting in both keyword lists feeds both of its features.
pub fn vectorize(tokens: &[Token], set: &KeywordSet) -> FeatureVector {
    let mut entries = Vec::new();
    for token in tokens {
        for &ordinal in set.ordinals_of(&token.lemma) {
            entries.push((ordinal, 1));
        }
    }
    FeatureVector::new(set.feature_dim(), entries)
}

/// A trained linear classifier bound to the keyword set that defines its
/// feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct SvcModel {
    language: Language,
    keyword_set: KeywordSet,
    weights: Vec<f64>,
    bias: f64,
    c: f64,
    seed: u64,
}

impl SvcModel {
    pub fn language(&self) -> Language {
        self.language
    }

    pub fn keyword_set(&self) -> &KeywordSet {
        &self.keyword_set
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn feature_dim(&self) -> usize {
        self.weights.len()
    }

    /// Raw decision value w.x + b.
    pub fn decision_value(&self, x: &FeatureVector) -> Result<f64> {
        if x.dim() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                vector: x.dim(),
                model: self.weights.len(),
            });
        }
        Ok(svm::decision(&self.weights, self.bias, x))
    }
}

/// Trains an SVM on pre-vectorized samples. The keyword set must be the one
/// the samples were vectorized with; it travels inside the model so
/// prediction and reporting never re-derive it.
pub fn train_svc(
    samples: &[FeatureVector],
    labels: &[Sentiment],
    keyword_set: KeywordSet,
    language: Language,
    c: f64,
    seed: u64,
) -> Result<(SvcModel, TrainStats)> {
    for x in samples {
        if x.dim() != keyword_set.feature_dim() {
            return Err(Error::DimensionMismatch {
                vector: x.dim(),
                model: keyword_set.feature_dim(),
            });
        }
    }
    let fit = svm::train(samples, labels, c, seed)?;
    Ok((
        SvcModel {
            language,
            keyword_set,
            weights: fit.weights,
            bias: fit.bias,
            c,
            seed,
        },
        fit.stats,
    ))
}

/// Classifies one vector: positive iff the decision value is >= 0.
pub fn predict(model: &SvcModel, x: &FeatureVector) -> Result<Sentiment> {
    Ok(if model.decision_value(x)? >= 0.0 {
        Sentiment::Positive
    } else {
        Sentiment::Negative
    })
}

/// F1 on the positive class. With no true positives but some error, the
/// score is 0. The degenerate all-negative-and-correct case (TP = FP =
/// FN = 0) scores 1: the prediction is flawless, and scoring it 0 would
/// punish folds that legitimately contain no positive sentence.
pub fn f1_score(predictions: &[Sentiment], golds: &[Sentiment]) -> Result<f64> {
    if predictions.len() != golds.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            golds: golds.len(),
        });
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    for (&p, &g) in predictions.iter().zip(golds) {
        match (p, g) {
            (Sentiment::Positive, Sentiment::Positive) => tp += 1,
            (Sentiment::Positive, Sentiment::Negative) => fp += 1,
            (Sentiment::Negative, Sentiment::Positive) => fn_ += 1,
            (Sentiment::Negative, Sentiment::Negative) => {}
        }
    }
    if tp == 0 {
        return Ok(if fp + fn_ == 0 { 1.0 } else { 0.0 });
    }
    Ok(2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fn_ as f64))
}

/// Reads labeled training sentences from `pos|neg<TAB>text` lines. Blank
/// lines and `#` comments are skipped; text may itself contain tabs.
pub fn read_training_data<R: BufRead>(reader: R) -> Result<Vec<(String, Sentiment)>> {
    let mut rows = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let number = number + 1;
        let err = |message: String| Error::TrainingFormat {
            line: number,
            message,
        };
        let line = line.map_err(|e| err(format!("read failed: {e}")))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, text) = line
            .split_once('\t')
            .ok_or_else(|| err("expected label<TAB>text".into()))?;
        let sentiment = Sentiment::from_code(label)
            .ok_or_else(|| err(format!("unknown label {label:?}, expected pos or neg")))?;
        if text.trim().is_empty() {
            return Err(err("empty sentence text".into()));
        }
        rows.push((text.to_string(), sentiment));
    }
    Ok(rows)
}

/// Writes training rows in the format [`read_training_data`] accepts.
pub fn write_training_data<W: Write>(
    writer: &mut W,
    rows: &[(String, Sentiment)],
) -> std::io::Result<()> {
    for (text, sentiment) in rows {
        writeln!(writer, "{}\t{}", sentiment.code(), text)?;
    }
    Ok(())
}

const MODEL_MAGIC: &str = "svc-model v1";

/// Writes the versioned flat-text model format: a magic line, header
/// key-value lines, one `ordinal<TAB>term<TAB>weight` line per feature in
/// feature order, and a final bias line. Weights use f64 `Display`, which
/// round-trips exactly through `parse`.
pub fn write_model<W: Write>(writer: &mut W, model: &SvcModel) -> std::io::Result<()> {
    writeln!(writer, "{MODEL_MAGIC}")?;
    writeln!(writer, "language\t{}", model.language.code())?;
    writeln!(writer, "alpha\t{}", model.keyword_set.alpha())?;
    writeln!(writer, "alpha_prime\t{}", model.keyword_set.alpha_prime())?;
    writeln!(writer, "c\t{}", model.c)?;
    writeln!(writer, "seed\t{}", model.seed)?;
    writeln!(writer, "positives\t{}", model.keyword_set.positive().len())?;
    writeln!(writer, "dimension\t{}", model.feature_dim())?;
    for (ordinal, (term, _)) in model.keyword_set.feature_order().enumerate() {
        writeln!(writer, "{ordinal}\t{term}\t{}", model.weights[ordinal])?;
    }
    writeln!(writer, "bias\t{}", model.bias)?;
    Ok(())
}

struct ModelLines<R: BufRead> {
    lines: std::iter::Enumerate<std::io::Lines<R>>,
}

impl<R: BufRead> ModelLines<R> {
    fn next_line(&mut self) -> Result<(usize, String)> {
        let (idx, line) = self.lines.next().ok_or(Error::ModelFormat {
            line: 0,
            message: "unexpected end of file".to_string(),
        })?;
        let line = line.map_err(|e| Error::ModelFormat {
            line: idx + 1,
            message: e.to_string(),
        })?;
        Ok((idx + 1, line))
    }
}

fn model_err(line: usize, message: impl Into<String>) -> Error {
    Error::ModelFormat {
        line,
        message: message.into(),
    }
}

/// Reads the format written by [`write_model`], validating the magic line,
/// header completeness, weight count, and finiteness of every number.
pub fn read_model<R: BufRead>(reader: R) -> Result<SvcModel> {
    let mut lines = ModelLines {
        lines: reader.lines().enumerate(),
    };
    let (n, magic) = lines.next_line()?;
    if magic != MODEL_MAGIC {
        return Err(model_err(n, format!("expected {MODEL_MAGIC:?}")));
    }

    let mut header = std::collections::HashMap::new();
    for key in ["language", "alpha", "alpha_prime", "c", "seed", "positives", "dimension"] {
        let (n, line) = lines.next_line()?;
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| model_err(n, "expected key<TAB>value"))?;
        if k != key {
            return Err(model_err(n, format!("expected header {key:?}, found {k:?}")));
        }
        header.insert(key, (n, v.to_string()));
    }
    let field = |key: &str| header.get(key).cloned().unwrap();

    let (n, lang) = field("language");
    let language = match lang.as_str() {
        "zh" => Language::Chinese,
        "en" => Language::English,
        other => return Err(model_err(n, format!("unknown language {other:?}"))),
    };
    let (n, alpha) = field("alpha");
    let alpha: Quarters = alpha.parse().map_err(|_| model_err(n, "bad alpha"))?;
    let (n, alpha_prime) = field("alpha_prime");
    let alpha_prime: Quarters = alpha_prime
        .parse()
        .map_err(|_| model_err(n, "bad alpha_prime"))?;
    let (n, c) = field("c");
    let c: f64 = c.parse().map_err(|_| model_err(n, "bad C"))?;
    if !c.is_finite() || c <= 0.0 {
        return Err(model_err(n, "C must be positive and finite"));
    }
    let (n, seed) = field("seed");
    let seed: u64 = seed.parse().map_err(|_| model_err(n, "bad seed"))?;
    let (n, positives) = field("positives");
    let positives: usize = positives
        .parse()
        .map_err(|_| model_err(n, "bad positives count"))?;
    let (n, dimension) = field("dimension");
    let dimension: usize = dimension
        .parse()
        .map_err(|_| model_err(n, "bad dimension"))?;
    if positives > dimension {
        return Err(model_err(n, "positives count exceeds dimension"));
    }

    let mut terms = Vec::with_capacity(dimension);
    let mut weights = Vec::with_capacity(dimension);
    for expected in 0..dimension {
        let (n, line) = lines.next_line()?;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(model_err(n, "expected ordinal<TAB>term<TAB>weight"));
        }
        let ordinal: usize = fields[0].parse().map_err(|_| model_err(n, "bad ordinal"))?;
        if ordinal != expected {
            return Err(model_err(
                n,
                format!("expected ordinal {expected}, found {ordinal}"),
            ));
        }
        if fields[1].is_empty() {
            return Err(model_err(n, "empty term"));
        }
        let weight: f64 = fields[2].parse().map_err(|_| model_err(n, "bad weight"))?;
        if !weight.is_finite() {
            return Err(model_err(n, "weight must be finite"));
        }
        terms.push(fields[1].to_string());
        weights.push(weight);
    }
    let (n, line) = lines.next_line()?;
    let bias = line
        .strip_prefix("bias\t")
        .and_then(|v| v.parse::<f64>().ok())
        .ok_or_else(|| model_err(n, "expected final bias line"))?;
    if !bias.is_finite() {
        return Err(model_err(n, "bias must be finite"));
    }

    let negative = terms.split_off(positives);
    let keyword_set = KeywordSet::new(alpha, alpha_prime, terms, negative);
    if keyword_set.feature_dim() != dimension {
        return Err(model_err(n, "duplicate terms within one class"));
    }
    Ok(SvcModel {
        language,
        keyword_set,
        weights,
        bias,
        c,
        seed,
    })
}
