//! Corpus classification, keyword and pair rankings, and hard/soft
//! attribute aggregation.
//!
//! Counting follows two rules worth naming. Keyword frequency defaults to
//! token occurrences (a keyword appearing twice in a sentence counts
//! twice), switchable to sentence-level presence. Hard/soft percentages
//! are the *unweighted* mean of the ranked keywords' category fractions —
//! each of the top keywords contributes equally regardless of its count —
//! computed in exact rational arithmetic and converted to floating point
//! only at the edge.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use crate::classifier::{SvcModel, predict, vectorize};
use crate::corpus::{Language, PriceBin, Review, SentenceRecord, Sentiment, assign_price_bin};
use crate::error::{Error, Result};
use crate::frac::Frac;
use crate::keywords::KeywordSet;
use crate::syntax::{AspectPair, PairRecord};
use crate::textproc::Tokenizer;

/// What a keyword's count counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMode {
    /// Every occurrence of the keyword contributes.
    #[default]
    Tokens,
    /// Each sentence containing the keyword contributes once.
    Sentences,
}

impl CountMode {
    pub fn code(self) -> &'static str {
        match self {
            CountMode::Tokens => "tokens",
            CountMode::Sentences => "sentences",
        }
    }
}

impl FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tokens" => Ok(CountMode::Tokens),
            "sentences" => Ok(CountMode::Sentences),
            _ => Err(Error::UnknownCountMode {
                value: s.to_string(),
            }),
        }
    }
}

/// Predicts a sentiment for every sentence. All sentences must carry the
/// model's language; any prior sentiment is overwritten.
pub fn classify_corpus(
    model: &SvcModel,
    mut sentences: Vec<SentenceRecord>,
    tokenizer: &Tokenizer,
) -> Result<Vec<SentenceRecord>> {
    for sentence in &mut sentences {
        if sentence.language != model.language() {
            return Err(Error::LanguageMismatch {
                sentence: sentence.sentence_id(),
                expected: model.language().code(),
                found: sentence.language.code(),
            });
        }
        let tokens = tokenizer.tokenize(&sentence.text, sentence.language);
        let x = vectorize(&tokens, model.keyword_set());
        sentence.sentiment = Some(predict(model, &x)?);
    }
    Ok(sentences)
}

/// Corpus volume in one price bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinCounts {
    pub hotels: usize,
    pub reviews: usize,
    pub sentences: usize,
    pub positive_sentences: usize,
    pub negative_sentences: usize,
}

/// Per-bin corpus volumes, All Prices first, then every concrete bin in
/// ordinal order (zero rows included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSummary {
    pub rows: Vec<(PriceBin, BinCounts)>,
}

impl CorpusSummary {
    pub fn counts_for(&self, bin: PriceBin) -> Option<&BinCounts> {
        self.rows.iter().find(|(b, _)| *b == bin).map(|(_, c)| c)
    }
}

/// Tallies hotels, reviews, and (classified) sentences per price bin.
/// Reviews are binned by their highest room price; the All Prices row
/// counts distinct hotels once, so it is not the column sum when a hotel's
/// reviews straddle bins.
pub fn summarize_counts(
    reviews: &[Review],
    sentences: &[SentenceRecord],
) -> Result<CorpusSummary> {
    let mut hotels: BTreeMap<u8, HashSet<&str>> = BTreeMap::new();
    let mut review_counts: BTreeMap<u8, usize> = BTreeMap::new();
    for review in reviews {
        let bin = assign_price_bin(review.price_high_jpy)?;
        for ordinal in [0, bin.ordinal()] {
            hotels.entry(ordinal).or_default().insert(&review.hotel_id);
            *review_counts.entry(ordinal).or_default() += 1;
        }
    }

    let mut sentence_counts: BTreeMap<u8, (usize, usize, usize)> = BTreeMap::new();
    for sentence in sentences {
        for ordinal in [0, sentence.price_bin.ordinal()] {
            let row = sentence_counts.entry(ordinal).or_default();
            row.0 += 1;
            match sentence.sentiment {
                Some(Sentiment::Positive) => row.1 += 1,
                Some(Sentiment::Negative) => row.2 += 1,
                None => {}
            }
        }
    }

    let mut rows = Vec::with_capacity(10);
    for bin in std::iter::once(PriceBin::ALL_PRICES).chain(PriceBin::concrete()) {
        let ordinal = bin.ordinal();
        let (sentence_total, positive, negative) =
            sentence_counts.get(&ordinal).copied().unwrap_or_default();
        rows.push((
            bin,
            BinCounts {
                hotels: hotels.get(&ordinal).map_or(0, HashSet::len),
                reviews: review_counts.get(&ordinal).copied().unwrap_or(0),
                sentences: sentence_total,
                positive_sentences: positive,
                negative_sentences: negative,
            },
        ));
    }
    Ok(CorpusSummary { rows })
}

/// The top keywords of one (language, price bin, sentiment) cell:
/// at most ten (keyword, count) entries, counts non-increasing, ties
/// broken lexicographically, drawn only from the sentiment's keyword list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordRanking {
    pub language: Language,
    pub price_bin: PriceBin,
    pub sentiment: Sentiment,
    pub entries: Vec<(String, u64)>,
}

fn bin_matches(requested: PriceBin, actual: PriceBin) -> bool {
    requested == PriceBin::ALL_PRICES || requested == actual
}

/// Counts the sentiment's keywords over matching sentences and keeps the
/// ten most frequent. Keywords that never occur are omitted, so shorter
/// rankings are legal. The All Prices bin aggregates every concrete bin.
pub fn rank_keywords(
    labeled: &[SentenceRecord],
    keyword_set: &KeywordSet,
    language: Language,
    bin: PriceBin,
    sentiment: Sentiment,
    count_mode: CountMode,
    tokenizer: &Tokenizer,
) -> KeywordRanking {
    let universe: HashSet<&str> = match sentiment {
        Sentiment::Positive => keyword_set.positive().iter().map(String::as_str).collect(),
        Sentiment::Negative => keyword_set.negative().iter().map(String::as_str).collect(),
    };
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for sentence in labeled {
        if sentence.language != language
            || sentence.sentiment != Some(sentiment)
            || !bin_matches(bin, sentence.price_bin)
        {
            continue;
        }
        let tokens = tokenizer.tokenize(&sentence.text, sentence.language);
        match count_mode {
            CountMode::Tokens => {
                for token in &tokens {
                    if let Some(&keyword) = universe.get(token.lemma.as_str()) {
                        *counts.entry(keyword).or_default() += 1;
                    }
                }
            }
            CountMode::Sentences => {
                let present: HashSet<&str> = tokens
                    .iter()
                    .filter_map(|t| universe.get(t.lemma.as_str()).copied())
                    .collect();
                for keyword in present {
                    *counts.entry(keyword).or_default() += 1;
                }
            }
        }
    }

    let mut entries: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(k, c)| (k.to_string(), c))
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(10);
    KeywordRanking {
        language,
        price_bin: bin,
        sentiment,
        entries,
    }
}

/// Anything that names a (modifier, noun) pair and the sentence it came
/// from — extracted pairs and reloaded dump rows both qualify.
pub trait PairLike {
    fn modifier(&self) -> &str;
    fn noun(&self) -> &str;
    fn sentence_ref(&self) -> &str;
}

impl PairLike for AspectPair {
    fn modifier(&self) -> &str {
        &self.modifier
    }

    fn noun(&self) -> &str {
        &self.noun
    }

    fn sentence_ref(&self) -> &str {
        &self.sentence_ref
    }
}

impl PairLike for PairRecord {
    fn modifier(&self) -> &str {
        &self.modifier
    }

    fn noun(&self) -> &str {
        &self.noun
    }

    fn sentence_ref(&self) -> &str {
        &self.sentence_ref
    }
}

/// The nouns most often paired with one adjective in one (price bin,
/// sentiment) cell: at most four (noun, count) entries, counts
/// non-increasing, ties broken lexicographically on the noun. Every pair
/// shares `adjective` as its modifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRanking {
    pub adjective: String,
    pub price_bin: PriceBin,
    pub sentiment: Sentiment,
    pub entries: Vec<(String, u64)>,
}

/// Counts the nouns paired with `adjective`, restricted to pairs whose
/// sentence carries the given sentiment and falls in the given bin. Pairs
/// whose sentence id is unknown are ignored. An adjective with no
/// surviving pairs yields an empty ranking.
pub fn top_pairs<P: PairLike>(
    adjective: &str,
    pairs: &[P],
    labeled: &[SentenceRecord],
    bin: PriceBin,
    sentiment: Sentiment,
) -> PairRanking {
    let by_id: HashMap<String, &SentenceRecord> = labeled
        .iter()
        .map(|s| (s.sentence_id(), s))
        .collect();
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for pair in pairs {
        if pair.modifier() != adjective {
            continue;
        }
        let Some(sentence) = by_id.get(pair.sentence_ref()) else {
            continue;
        };
        if sentence.sentiment != Some(sentiment) || !bin_matches(bin, sentence.price_bin) {
            continue;
        }
        *counts.entry(pair.noun()).or_default() += 1;
    }
    let mut entries: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(noun, c)| (noun.to_string(), c))
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(4);
    PairRanking {
        adjective: adjective.to_string(),
        price_bin: bin,
        sentiment,
        entries,
    }
}

/// How one keyword divides across attribute categories. The three
/// fractions are exact rationals summing to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attribution {
    pub hard: Frac,
    pub soft: Frac,
    pub undefined: Frac,
}

/// Keyword → attribution table, loaded from a hand-labeled TSV.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AttributeLexicon {
    entries: BTreeMap<String, Attribution>,
}

impl AttributeLexicon {
    pub fn get(&self, keyword: &str) -> Option<&Attribution> {
        self.entries.get(keyword)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Attribution)> {
        self.entries.iter().map(|(k, a)| (k.as_str(), a))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Reads an attribute lexicon from `keyword<TAB>hard<TAB>soft<TAB>undefined`
/// rows (decimal fractions). Blank lines and `#` comments are skipped.
/// Every triple must sum to 1 and every fraction must lie in [0, 1].
pub fn load_attribute_lexicon(path: impl AsRef<Path>) -> Result<AttributeLexicon> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_attribute_lexicon(BufReader::new(file))
}

/// See [`load_attribute_lexicon`]; errors carry 1-based line numbers.
pub fn parse_attribute_lexicon<R: BufRead>(reader: R) -> Result<AttributeLexicon> {
    // The sum tolerance admits hand-written rounding like 0.333/0.333/0.334.
    let tolerance = Frac::new(1, 1_000_000_000);
    let mut entries = BTreeMap::new();
    for (number, line) in reader.lines().enumerate() {
        let number = number + 1;
        let err = |message: String| Error::LexiconFormat {
            line: number,
            message,
        };
        let line = line.map_err(|e| err(format!("read failed: {e}")))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(format!(
                "expected 4 tab-separated columns, found {}",
                fields.len()
            )));
        }
        let keyword = fields[0].trim();
        if keyword.is_empty() {
            return Err(err("empty keyword".into()));
        }
        let mut fractions = [Frac::ZERO; 3];
        for (slot, raw) in fractions.iter_mut().zip(&fields[1..]) {
            let value = Frac::from_decimal(raw.trim())
                .ok_or_else(|| err(format!("{raw:?} is not a decimal fraction")))?;
            if value < Frac::ZERO || value > Frac::ONE {
                return Err(err(format!("fraction {raw} is outside [0, 1]")));
            }
            *slot = value;
        }
        let sum = fractions[0] + fractions[1] + fractions[2];
        if (sum - Frac::ONE).abs() > tolerance {
            return Err(err(format!(
                "fractions for {keyword:?} sum to {sum:?}, expected 1"
            )));
        }
        let attribution = Attribution {
            hard: fractions[0],
            soft: fractions[1],
            undefined: fractions[2],
        };
        if entries.insert(keyword.to_string(), attribution).is_some() {
            return Err(err(format!("duplicate keyword {keyword:?}")));
        }
    }
    Ok(AttributeLexicon { entries })
}

/// Hard/soft/undefined percentages for one ranking cell. The three
/// percentages sum to 100 up to floating-point conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct HardSoftSummary {
    pub language: Language,
    pub price_bin: PriceBin,
    pub sentiment: Sentiment,
    pub hard_pct: f64,
    pub soft_pct: f64,
    pub undefined_pct: f64,
    pub n_keywords: usize,
}

/// Averages the ranked keywords' attribute fractions — unweighted, so
/// every top keyword counts equally — and scales to percentages. The whole
/// computation is rational; floats appear only in the returned summary.
pub fn aggregate_hard_soft(
    ranking: &KeywordRanking,
    lexicon: &AttributeLexicon,
) -> Result<HardSoftSummary> {
    if ranking.entries.is_empty() {
        return Err(Error::EmptyRanking);
    }
    let mut sums = [Frac::ZERO; 3];
    for (keyword, _) in &ranking.entries {
        let attribution = lexicon
            .get(keyword)
            .ok_or_else(|| Error::MissingAttribution {
                keyword: keyword.clone(),
            })?;
        sums[0] = sums[0] + attribution.hard;
        sums[1] = sums[1] + attribution.soft;
        sums[2] = sums[2] + attribution.undefined;
    }
    let n = ranking.entries.len();
    let scale = Frac::new(100, n as i128);
    Ok(HardSoftSummary {
        language: ranking.language,
        price_bin: ranking.price_bin,
        sentiment: ranking.sentiment,
        hard_pct: (sums[0] * scale).to_f64(),
        soft_pct: (sums[1] * scale).to_f64(),
        undefined_pct: (sums[2] * scale).to_f64(),
        n_keywords: n,
    })
}

/// Writes rankings as `price_bin<TAB>rank<TAB>keyword<TAB>count` rows,
/// rank 1-based within each ranking.
pub fn write_keyword_rankings<W: Write>(
    writer: &mut W,
    rankings: &[KeywordRanking],
) -> std::io::Result<()> {
    for ranking in rankings {
        for (rank, (keyword, count)) in ranking.entries.iter().enumerate() {
            writeln!(
                writer,
                "{}\t{}\t{}\t{}",
                ranking.price_bin.ordinal(),
                rank + 1,
                keyword,
                count
            )?;
        }
    }
    Ok(())
}

/// Reads a ranking dump back. The file carries neither language nor
/// sentiment — the caller supplies the cell identity — and consecutive
/// rows with the same price bin fold into one ranking. Ranks must count
/// 1, 2, ... within each bin and counts must be non-increasing.
pub fn parse_keyword_rankings<R: BufRead>(
    reader: R,
    language: Language,
    sentiment: Sentiment,
) -> Result<Vec<KeywordRanking>> {
    let mut rankings: Vec<KeywordRanking> = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let number = number + 1;
        let err = |message: String| Error::RankingFormat {
            line: number,
            message,
        };
        let line = line.map_err(|e| err(format!("read failed: {e}")))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(format!(
                "expected 4 tab-separated columns, found {}",
                fields.len()
            )));
        }
        let ordinal: u8 = fields[0]
            .parse()
            .map_err(|_| err(format!("{:?} is not a price bin ordinal", fields[0])))?;
        let bin = PriceBin::from_ordinal(ordinal)
            .ok_or_else(|| err(format!("price bin ordinal {ordinal} out of range")))?;
        let rank: usize = fields[1]
            .parse()
            .map_err(|_| err(format!("{:?} is not a rank", fields[1])))?;
        let keyword = fields[2];
        if keyword.is_empty() {
            return Err(err("empty keyword".into()));
        }
        let count: u64 = fields[3]
            .parse()
            .map_err(|_| err(format!("{:?} is not a count", fields[3])))?;

        let start_new = match rankings.last() {
            Some(last) => last.price_bin != bin,
            None => true,
        };
        if start_new {
            if rank != 1 {
                return Err(err(format!("bin {ordinal} must start at rank 1, got {rank}")));
            }
            rankings.push(KeywordRanking {
                language,
                price_bin: bin,
                sentiment,
                entries: Vec::new(),
            });
        }
        let current = rankings.last_mut().expect("just pushed or verified");
        if rank != current.entries.len() + 1 {
            return Err(err(format!(
                "expected rank {}, got {rank}",
                current.entries.len() + 1
            )));
        }
        if let Some((_, previous)) = current.entries.last()
            && count > *previous
        {
            return Err(err(format!(
                "count {count} exceeds the preceding count {previous}"
            )));
        }
        current.entries.push((keyword.to_string(), count));
    }
    Ok(rankings)
}
