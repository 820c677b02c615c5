//! Entropy-based keyword selection.
//!
//! A term's usefulness for a class is measured by the Shannon entropy of its
//! per-document occurrence counts within that class: a term spread evenly
//! over many documents of one class carries more of that class's signal than
//! one concentrated in a single document. A term becomes a positive keyword
//! when its positive entropy exceeds the negative entropy by the factor
//! alpha (strictly), and symmetrically for negative keywords with the factor
//! alpha'. Both factors move on an exact quarter-step grid, so comparisons
//! never depend on decimal parsing noise.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::Sentiment;
use crate::error::{Error, Result};
use crate::textproc::TermClassCounts;

/// Shannon entropy, in bits, of one term's per-document counts within a
/// class: H = -sum over occurring documents of (n_i/T) log2(n_i/T) where
/// T is the total count. An empty or all-zero slice has entropy 0, as does
/// a term occurring in a single document.
pub fn class_entropy(counts: &[u32]) -> f64 {
    let total: u64 = counts.iter().map(|&n| n as u64).sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let mut h = 0.0;
    for &n in counts {
        if n == 0 {
            continue;
        }
        let p = n as f64 / total;
        h -= p * p.log2();
    }
    h
}

/// A non-negative number constrained to exact multiples of 0.25. Grid
/// parameters (alpha, alpha', C) live on this type so that grid order,
/// serialization, and equality are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Quarters(u32);

impl Quarters {
    pub const fn from_quarter_count(quarters: u32) -> Quarters {
        Quarters(quarters)
    }

    /// Accepts values within 1e-9 of a quarter multiple; anything else is a
    /// configuration error, not something to round silently.
    pub fn try_from_f64(value: f64) -> Result<Quarters> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NotQuarterStep { value });
        }
        let scaled = value * 4.0;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-9 {
            return Err(Error::NotQuarterStep { value });
        }
        Ok(Quarters(rounded as u32))
    }

    pub fn quarter_count(self) -> u32 {
        self.0
    }

    /// Exact f64: quarter multiples are dyadic rationals.
    pub fn as_f64(self) -> f64 {
        self.0 as f64 * 0.25
    }
}

impl fmt::Display for Quarters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / 4;
        match self.0 % 4 {
            0 => write!(f, "{whole}"),
            1 => write!(f, "{whole}.25"),
            2 => write!(f, "{whole}.5"),
            _ => write!(f, "{whole}.75"),
        }
    }
}

impl std::str::FromStr for Quarters {
    type Err = Error;

    fn from_str(s: &str) -> Result<Quarters> {
        let value: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::NotQuarterStep { value: f64::NAN })?;
        Quarters::try_from_f64(value)
    }
}

/// The default comparison-factor grid: 1.25 to 6.00 in steps of 0.25,
/// twenty values.
pub fn alpha_grid() -> Vec<Quarters> {
    (5..=24).map(Quarters).collect()
}

/// An inclusive quarter-step range, for building grids from configuration.
pub fn quarter_range(start: Quarters, end: Quarters, step: Quarters) -> Result<Vec<Quarters>> {
    if step.0 == 0 || end < start {
        return Err(Error::EmptyGrid {
            grid: "quarter range",
        });
    }
    Ok((start.0..=end.0).step_by(step.0 as usize).map(Quarters).collect())
}

/// Entropy of one term in both classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRow {
    pub h_pos: f64,
    pub h_neg: f64,
}

/// Per-term class entropies over a labeled corpus, keyed by lemma in
/// lexicographic order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntropyTable {
    rows: std::collections::BTreeMap<String, EntropyRow>,
}

impl EntropyTable {
    pub fn from_counts(counts: &TermClassCounts) -> EntropyTable {
        let rows = counts
            .iter()
            .map(|(term, c)| {
                (
                    term.to_string(),
                    EntropyRow {
                        h_pos: class_entropy(&c.positive),
                        h_neg: class_entropy(&c.negative),
                    },
                )
            })
            .collect();
        EntropyTable { rows }
    }

    pub fn get(&self, term: &str) -> Option<EntropyRow> {
        self.rows.get(term).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, EntropyRow)> {
        self.rows.iter().map(|(t, r)| (t.as_str(), *r))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Selected keywords for one (alpha, alpha') pair. Lists are sorted
/// lexicographically and the feature order is all positive keywords
/// followed by all negative keywords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordSet {
    alpha: Quarters,
    alpha_prime: Quarters,
    positive: Vec<String>,
    negative: Vec<String>,
    /// Lemma -> feature ordinals. A term may legitimately carry two
    /// ordinals when alpha * alpha' <= 1 lets it into both lists.
    index: HashMap<String, Vec<usize>>,
}

impl KeywordSet {
    pub fn new(
        alpha: Quarters,
        alpha_prime: Quarters,
        mut positive: Vec<String>,
        mut negative: Vec<String>,
    ) -> KeywordSet {
        positive.sort();
        positive.dedup();
        negative.sort();
        negative.dedup();
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (ordinal, term) in positive.iter().chain(negative.iter()).enumerate() {
            index.entry(term.clone()).or_default().push(ordinal);
        }
        KeywordSet {
            alpha,
            alpha_prime,
            positive,
            negative,
            index,
        }
    }

    pub fn alpha(&self) -> Quarters {
        self.alpha
    }

    pub fn alpha_prime(&self) -> Quarters {
        self.alpha_prime
    }

    pub fn positive(&self) -> &[String] {
        &self.positive
    }

    pub fn negative(&self) -> &[String] {
        &self.negative
    }

    pub fn feature_dim(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn total_keywords(&self) -> usize {
        self.feature_dim()
    }

    /// Feature ordinals of a lemma (usually zero or one, two when the term
    /// sits in both lists).
    pub fn ordinals_of(&self, term: &str) -> &[usize] {
        self.index.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Terms in feature order with their class.
    pub fn feature_order(&self) -> impl Iterator<Item = (&str, Sentiment)> {
        self.positive
            .iter()
            .map(|t| (t.as_str(), Sentiment::Positive))
            .chain(self.negative.iter().map(|t| (t.as_str(), Sentiment::Negative)))
    }
}

/// Applies the selection rule: positive keywords satisfy
/// H_pos > alpha * H_neg with H_pos > 0, negative keywords satisfy
/// H_neg > alpha' * H_pos with H_neg > 0. Inequalities are strict, so a
/// term with entropy exactly on the threshold stays out.
pub fn select_keywords(table: &EntropyTable, alpha: Quarters, alpha_prime: Quarters) -> KeywordSet {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (term, row) in table.iter() {
        if row.h_pos > 0.0 && row.h_pos > alpha.as_f64() * row.h_neg {
            positive.push(term.to_string());
        }
        if row.h_neg > 0.0 && row.h_neg > alpha_prime.as_f64() * row.h_pos {
            negative.push(term.to_string());
        }
    }
    KeywordSet::new(alpha, alpha_prime, positive, negative)
}

/// Writes a keyword set as TSV: a `# alpha=..<TAB>alpha_prime=..` header
/// line, then `term<TAB>class<TAB>h_pos<TAB>h_neg` rows in feature order.
/// Entropies come from `table`; terms missing from it (possible only with a
/// hand-built set) are written with zero entropies.
pub fn write_keywords<W: Write>(writer: &mut W, set: &KeywordSet, table: &EntropyTable) -> std::io::Result<()> {
    writeln!(
        writer,
        "# alpha={}\talpha_prime={}",
        set.alpha(),
        set.alpha_prime()
    )?;
    for (term, class) in set.feature_order() {
        let row = table.get(term).unwrap_or(EntropyRow { h_pos: 0.0, h_neg: 0.0 });
        writeln!(writer, "{term}\t{}\t{}\t{}", class.code(), row.h_pos, row.h_neg)?;
    }
    Ok(())
}

/// Reads the format produced by [`write_keywords`]. The entropy columns are
/// informational; membership and the alpha pair reconstruct the set.
pub fn read_keywords<R: BufRead>(reader: R) -> Result<KeywordSet> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::KeywordFormat {
        line: 1,
        message: "empty file".to_string(),
    })?;
    let header = header.map_err(|e| Error::KeywordFormat {
        line: 1,
        message: e.to_string(),
    })?;
    let (alpha, alpha_prime) = parse_keyword_header(&header)?;
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::KeywordFormat {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::KeywordFormat {
                line: line_no,
                message: format!("expected 4 tab-separated fields, got {}", fields.len()),
            });
        }
        match fields[1] {
            "pos" => positive.push(fields[0].to_string()),
            "neg" => negative.push(fields[0].to_string()),
            other => {
                return Err(Error::KeywordFormat {
                    line: line_no,
                    message: format!("unknown class {other:?}"),
                });
            }
        }
    }
    Ok(KeywordSet::new(alpha, alpha_prime, positive, negative))
}

fn parse_keyword_header(header: &str) -> Result<(Quarters, Quarters)> {
    let bad = |message: String| Error::KeywordFormat { line: 1, message };
    let rest = header
        .strip_prefix("# ")
        .ok_or_else(|| bad("missing '# alpha=..' header".to_string()))?;
    let mut alpha = None;
    let mut alpha_prime = None;
    for part in rest.split('\t') {
        if let Some(v) = part.strip_prefix("alpha=") {
            alpha = Some(v.parse::<Quarters>()?);
        } else if let Some(v) = part.strip_prefix("alpha_prime=") {
            alpha_prime = Some(v.parse::<Quarters>()?);
        }
    }
    match (alpha, alpha_prime) {
        (Some(a), Some(p)) => Ok((a, p)),
        _ => Err(bad("header must carry alpha and alpha_prime".to_string())),
    }
}
