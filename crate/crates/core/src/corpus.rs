//! Review corpus handling: loading, language detection, price binning,
//! sentence splitting, hotel matching, and date filtering.
//!
//! Reviews arrive as JSON lines from two sources (one Chinese, one English)
//! that describe the same hotels under different identifiers. Everything
//! downstream works on [`SentenceRecord`]s, which carry their review's price
//! bin and language so later stages never need to re-join against the raw
//! corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Review or sentence language as detected (or declared in the input).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Language {
    Chinese,
    English,
    Other,
}

impl Language {
    pub fn code(self) -> &'static str {
        match self {
            Language::Chinese => "zh",
            Language::English => "en",
            Language::Other => "other",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Sentence-level polarity. The classifier maps these onto {+1, -1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sentiment {
    Positive,
    Negative,
}

impl Sentiment {
    pub fn code(self) -> &'static str {
        match self {
            Sentiment::Positive => "pos",
            Sentiment::Negative => "neg",
        }
    }

    pub fn from_code(code: &str) -> Option<Sentiment> {
        match code {
            "pos" => Some(Sentiment::Positive),
            "neg" => Some(Sentiment::Negative),
            _ => None,
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Nightly-rate boundaries in JPY. Bin `i` (1-based) covers
/// `[BOUNDARIES[i-1], BOUNDARIES[i])`; prices at or above the last boundary
/// are rejected rather than silently clamped.
pub const PRICE_BOUNDARIES: [u32; 10] = [
    0, 2_500, 5_000, 10_000, 15_000, 20_000, 30_000, 50_000, 100_000, 200_000,
];

/// A half-open price range. Ordinal 0 is the synthetic "All Prices" bin that
/// aggregations compute on the fly; it is never attached to a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PriceBin {
    ordinal: u8,
}

impl PriceBin {
    pub const ALL_PRICES: PriceBin = PriceBin { ordinal: 0 };

    pub fn from_ordinal(ordinal: u8) -> Option<PriceBin> {
        (ordinal <= 9).then_some(PriceBin { ordinal })
    }

    pub fn ordinal(self) -> u8 {
        self.ordinal
    }

    /// Inclusive lower bound in JPY.
    pub fn low(self) -> u32 {
        if self.ordinal == 0 {
            0
        } else {
            PRICE_BOUNDARIES[self.ordinal as usize - 1]
        }
    }

    /// Exclusive upper bound in JPY.
    pub fn high(self) -> u32 {
        if self.ordinal == 0 {
            *PRICE_BOUNDARIES.last().unwrap()
        } else {
            PRICE_BOUNDARIES[self.ordinal as usize]
        }
    }

    pub fn label(self) -> String {
        if self.ordinal == 0 {
            "All Prices".to_string()
        } else {
            format!("{}-{}", self.low(), self.high())
        }
    }

    /// The nine concrete bins, in order.
    pub fn concrete() -> impl Iterator<Item = PriceBin> {
        (1..=9u8).map(|ordinal| PriceBin { ordinal })
    }
}

/// Maps a nightly rate to its bin. Prices at or beyond the top boundary are
/// an error: the bin table is a closed world and clamping would silently
/// move a hotel between ranges.
pub fn assign_price_bin(price: u32) -> Result<PriceBin> {
    let limit = *PRICE_BOUNDARIES.last().unwrap();
    if price >= limit {
        return Err(Error::PriceOutOfRange { price, limit });
    }
    let idx = PRICE_BOUNDARIES.partition_point(|&b| b <= price);
    Ok(PriceBin { ordinal: idx as u8 })
}

/// One hotel review after schema validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub review_id: String,
    pub hotel_id: String,
    pub hotel_name_en: String,
    pub date: NaiveDate,
    pub price_low_jpy: u32,
    pub price_high_jpy: u32,
    pub language: Language,
    pub text: String,
}

/// One sentence cut from a review, carrying enough review context for every
/// later stage. `sentiment` stays `None` until classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub parent_review_id: String,
    pub index_in_review: u32,
    pub text: String,
    pub language: Language,
    pub price_bin: PriceBin,
    pub sentiment: Option<Sentiment>,
}

impl SentenceRecord {
    /// Stable identifier used to bind a sentence to its dependency parse.
    pub fn sentence_id(&self) -> String {
        format!("{}:{}", self.parent_review_id, self.index_in_review)
    }
}

/// Known input formats for [`load_reviews`]. Only one exists today; the
/// parameter keeps file layout changes out of call sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSchema {
    ReviewsV1,
}

/// Whether a malformed input line aborts the load or is skipped and
/// reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    Strict,
    Lenient,
}

/// A skipped input line and why it was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineDiagnostic {
    pub line: usize,
    pub message: String,
}

/// Result of loading a review file: the valid records plus, in lenient mode,
/// one diagnostic per skipped line.
#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub reviews: Vec<Review>,
    pub skipped: Vec<LineDiagnostic>,
}

#[derive(Deserialize)]
struct RawReview {
    id: String,
    hotel_id: String,
    hotel_name_en: String,
    date: String,
    price_low_jpy: u32,
    price_high_jpy: u32,
    #[serde(default)]
    lang: Option<String>,
    text: String,
}

fn validate_raw(raw: RawReview) -> std::result::Result<Review, String> {
    if raw.id.is_empty() {
        return Err("empty review id".to_string());
    }
    if raw.hotel_id.is_empty() {
        return Err(format!("review {}: empty hotel id", raw.id));
    }
    if raw.text.trim().is_empty() {
        return Err(format!("review {}: empty text", raw.id));
    }
    if raw.price_low_jpy > raw.price_high_jpy {
        return Err(format!(
            "review {}: price_low_jpy {} exceeds price_high_jpy {}",
            raw.id, raw.price_low_jpy, raw.price_high_jpy
        ));
    }
    let date = NaiveDate::parse_from_str(&raw.date, "%Y-%m-%d")
        .map_err(|e| format!("review {}: bad date {:?}: {e}", raw.id, raw.date))?;
    let language = match raw.lang.as_deref() {
        None => detect_language(&raw.text),
        Some("zh") => Language::Chinese,
        Some("en") => Language::English,
        Some(other) => return Err(format!("review {}: unknown lang tag {other:?}", raw.id)),
    };
    Ok(Review {
        review_id: raw.id,
        hotel_id: raw.hotel_id,
        hotel_name_en: raw.hotel_name_en,
        date,
        price_low_jpy: raw.price_low_jpy,
        price_high_jpy: raw.price_high_jpy,
        language,
        text: raw.text,
    })
}

/// Loads a JSON-lines review file. Blank lines are ignored. In strict mode
/// the first malformed line aborts; in lenient mode malformed lines become
/// [`LineDiagnostic`]s. A file with no valid record at all is an error in
/// both modes.
pub fn load_reviews(path: &Path, schema: InputSchema, mode: LoadMode) -> Result<LoadOutcome> {
    let InputSchema::ReviewsV1 = schema;
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reviews = Vec::new();
    let mut skipped = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<RawReview>(line)
            .map_err(|e| e.to_string())
            .and_then(validate_raw);
        match parsed {
            Ok(review) => reviews.push(review),
            Err(message) => match mode {
                LoadMode::Strict => {
                    return Err(Error::MalformedRecord {
                        path: path.to_path_buf(),
                        line: line_no,
                        message,
                    });
                }
                LoadMode::Lenient => skipped.push(LineDiagnostic {
                    line: line_no,
                    message,
                }),
            },
        }
    }
    if reviews.is_empty() {
        return Err(Error::NoValidRecords {
            path: path.to_path_buf(),
        });
    }
    Ok(LoadOutcome { reviews, skipped })
}

fn is_han(c: char) -> bool {
    matches!(c,
        '\u{4E00}'..='\u{9FFF}'
        | '\u{3400}'..='\u{4DBF}'
        | '\u{F900}'..='\u{FAFF}'
        | '\u{20000}'..='\u{2FA1F}'
        | '\u{30000}'..='\u{3134F}')
}

fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic() || matches!(c, '\u{00C0}'..='\u{024F}')
}

/// Script-based language guess. Counts only letter-class codepoints: a text
/// that is 30%+ Han is Chinese (checked first, since Chinese reviews often
/// quote Latin names), one that is 50%+ Latin is English, anything else —
/// including text with no letters at all — is Other.
pub fn detect_language(text: &str) -> Language {
    let mut letters = 0u32;
    let mut han = 0u32;
    let mut latin = 0u32;
    for c in text.chars() {
        if c.is_alphabetic() {
            letters += 1;
            if is_han(c) {
                han += 1;
            } else if is_latin_letter(c) {
                latin += 1;
            }
        }
    }
    if letters == 0 {
        return Language::Other;
    }
    let letters = letters as f64;
    if han as f64 / letters > 0.30 {
        Language::Chinese
    } else if latin as f64 / letters > 0.50 {
        Language::English
    } else {
        Language::Other
    }
}

/// Default abbreviation guard for English sentence splitting: a period that
/// terminates one of these tokens does not end a sentence.
pub const DEFAULT_ABBREVIATIONS: [&str; 8] = [
    "mr.", "mrs.", "dr.", "st.", "vs.", "e.g.", "i.e.", "etc.",
];

/// Tunables for [`split_sentences_with`]. The default abbreviation list is
/// [`DEFAULT_ABBREVIATIONS`]; entries must be lowercase and include the
/// trailing period.
#[derive(Debug, Clone)]
pub struct SplitOptions {
    pub abbreviations: BTreeSet<String>,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            abbreviations: DEFAULT_ABBREVIATIONS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

const CHINESE_DELIMITERS: [char; 9] = ['。', '．', '！', '？', '；', '…', '.', '!', '?'];

/// Splits a review into sentences with the default abbreviation list.
pub fn split_sentences(review: &Review) -> Result<Vec<SentenceRecord>> {
    split_sentences_with(review, &SplitOptions::default())
}

/// Splits a review into [`SentenceRecord`]s.
///
/// Chinese text splits at every occurrence of a terminal mark (。．！？；…
/// plus ASCII .!?). English text splits at .!? only when followed by
/// whitespace or end of text, and a period that closes a known abbreviation
/// is not a boundary. Split-point delimiters are dropped, fragments are
/// whitespace-normalised (so records stay single-line), and empty fragments
/// disappear.
pub fn split_sentences_with(review: &Review, options: &SplitOptions) -> Result<Vec<SentenceRecord>> {
    let fragments = match review.language {
        Language::Chinese => split_chinese(&review.text),
        Language::English => split_english(&review.text, &options.abbreviations),
        Language::Other => {
            return Err(Error::UnsupportedLanguage {
                review_id: review.review_id.clone(),
            });
        }
    };
    let price_bin = assign_price_bin(review.price_high_jpy)?;
    Ok(fragments
        .into_iter()
        .filter_map(|fragment| {
            let text = fragment.split_whitespace().collect::<Vec<_>>().join(" ");
            (!text.is_empty()).then_some(text)
        })
        .enumerate()
        .map(|(index, text)| SentenceRecord {
            parent_review_id: review.review_id.clone(),
            index_in_review: index as u32,
            text,
            language: review.language,
            price_bin,
            sentiment: None,
        })
        .collect())
}

fn split_chinese(text: &str) -> Vec<String> {
    let mut fragments = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if CHINESE_DELIMITERS.contains(&c) {
            fragments.push(std::mem::take(&mut current));
        } else {
            current.push(c);
        }
    }
    fragments.push(current);
    fragments
}

fn split_english(text: &str, abbreviations: &BTreeSet<String>) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut fragments = Vec::new();
    let mut start = 0usize;
    for i in 0..chars.len() {
        let c = chars[i];
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let at_end = i + 1 == chars.len();
        if !at_end && !chars[i + 1].is_whitespace() {
            continue;
        }
        if c == '.' && ends_with_abbreviation(&chars[..=i], abbreviations) {
            continue;
        }
        fragments.push(chars[start..i].iter().collect());
        start = i + 1;
    }
    fragments.push(chars[start..].iter().collect());
    fragments
}

/// True when the maximal non-whitespace run ending at the final character of
/// `prefix` (which includes the period) is a known abbreviation.
fn ends_with_abbreviation(prefix: &[char], abbreviations: &BTreeSet<String>) -> bool {
    let mut j = prefix.len();
    while j > 0 && !prefix[j - 1].is_whitespace() {
        j -= 1;
    }
    let token: String = prefix[j..].iter().collect::<String>().to_lowercase();
    abbreviations.contains(&token)
}

/// One cross-source hotel identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HotelMatch {
    pub normalized_name: String,
    pub id_a: String,
    pub id_b: String,
}

/// Outcome of matching hotels between two review sources by normalized
/// English name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HotelJoin {
    pub matched: Vec<HotelMatch>,
    pub unmatched_a: Vec<String>,
    pub unmatched_b: Vec<String>,
    /// Human-readable notes about ambiguous names (several hotel ids sharing
    /// one normalized name on the same side).
    pub diagnostics: Vec<String>,
}

/// Lowercases, strips punctuation, and collapses whitespace so that
/// "The Grand-Hotel, Tokyo" and "the grand hotel tokyo" agree.
pub fn normalize_hotel_name(name: &str) -> String {
    let mut cleaned = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_alphanumeric() {
            cleaned.extend(c.to_lowercase());
        } else {
            // Punctuation separates words just like whitespace, so
            // "Grand-Hotel" and "Grand Hotel" normalize identically.
            cleaned.push(' ');
        }
    }
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn names_by_id(reviews: &[Review]) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    for review in reviews {
        map.entry(review.hotel_id.clone())
            .or_insert_with(|| normalize_hotel_name(&review.hotel_name_en));
    }
    map
}

fn ids_by_name(names: &BTreeMap<String, String>) -> BTreeMap<String, Vec<String>> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (id, name) in names {
        map.entry(name.clone()).or_default().push(id.clone());
    }
    map
}

/// Links hotels across the two sources by normalized English name. A name
/// yields a match only when exactly one hotel id carries it on each side;
/// every other configuration leaves the ids unmatched, with a diagnostic
/// when the cause is ambiguity. Swapping the argument order mirrors the
/// result.
pub fn match_hotels(source_a: &[Review], source_b: &[Review]) -> HotelJoin {
    let names_a = names_by_id(source_a);
    let names_b = names_by_id(source_b);
    let by_name_a = ids_by_name(&names_a);
    let by_name_b = ids_by_name(&names_b);

    let mut join = HotelJoin::default();
    let mut matched_a: BTreeSet<&str> = BTreeSet::new();
    let mut matched_b: BTreeSet<&str> = BTreeSet::new();

    for (name, ids_a) in &by_name_a {
        let Some(ids_b) = by_name_b.get(name) else {
            continue;
        };
        if ids_a.len() == 1 && ids_b.len() == 1 {
            join.matched.push(HotelMatch {
                normalized_name: name.clone(),
                id_a: ids_a[0].clone(),
                id_b: ids_b[0].clone(),
            });
            matched_a.insert(ids_a[0].as_str());
            matched_b.insert(ids_b[0].as_str());
        } else {
            join.diagnostics.push(format!(
                "ambiguous hotel name {:?}: {} id(s) in source A, {} id(s) in source B",
                name,
                ids_a.len(),
                ids_b.len()
            ));
        }
    }

    join.unmatched_a = names_a
        .keys()
        .filter(|id| !matched_a.contains(id.as_str()))
        .cloned()
        .collect();
    join.unmatched_b = names_b
        .keys()
        .filter(|id| !matched_b.contains(id.as_str()))
        .cloned()
        .collect();
    join
}

/// Keeps reviews dated within `[start, end]`, preserving order.
pub fn filter_by_date(reviews: Vec<Review>, start: NaiveDate, end: NaiveDate) -> Vec<Review> {
    reviews
        .into_iter()
        .filter(|r| r.date >= start && r.date <= end)
        .collect()
}
