//! Tokenization, lemmatization, and per-class term statistics.
//!
//! Chinese input is pre-segmented (words separated by spaces), so its
//! tokenizer is a whitespace split and every token is its own lemma. English
//! goes through a rule lemmatizer backed by a bundled exception table; the
//! table is checked before any suffix rule and can be replaced wholesale for
//! domains with different vocabulary.
//!
//! Lemmatization is a fixpoint: rules reapply until the word stops changing,
//! which is what makes `lemmatize` idempotent for every input rather than
//! just the ones each rule anticipates.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{Language, SentenceRecord, Sentiment};
use crate::error::{Error, Result};

/// Exception table compiled into the binary. One `form<TAB>lemma` pair per
/// line; `#` starts a comment.
pub const BUNDLED_LEMMA_EXCEPTIONS: &str = include_str!("data/lemma_exceptions.tsv");

/// One token of a sentence. `position` is the 0-based token index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub position: u32,
}

/// English rule lemmatizer with an exception table.
#[derive(Debug, Clone)]
pub struct Lemmatizer {
    exceptions: HashMap<String, String>,
}

impl Lemmatizer {
    /// Builds the lemmatizer from the bundled exception table.
    pub fn bundled() -> Lemmatizer {
        Lemmatizer::from_tsv(BUNDLED_LEMMA_EXCEPTIONS)
            .expect("bundled lemma exception table is well-formed")
    }

    /// Parses an exception table: `form<TAB>lemma` per line, lowercase,
    /// comments starting with `#` and blank lines ignored.
    pub fn from_tsv(text: &str) -> Result<Lemmatizer> {
        let mut exceptions = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((form, lemma)) = line.split_once('\t') else {
                return Err(Error::LemmaTable {
                    line: line_no,
                    message: "expected form<TAB>lemma".to_string(),
                });
            };
            let (form, lemma) = (form.trim(), lemma.trim());
            if form.is_empty() || lemma.is_empty() {
                return Err(Error::LemmaTable {
                    line: line_no,
                    message: "empty form or lemma".to_string(),
                });
            }
            if form != form.to_lowercase() || lemma != lemma.to_lowercase() {
                return Err(Error::LemmaTable {
                    line: line_no,
                    message: format!("entry {form:?} -> {lemma:?} is not lowercase"),
                });
            }
            exceptions.insert(form.to_string(), lemma.to_string());
        }
        Ok(Lemmatizer { exceptions })
    }

    /// Lowercases and reduces a word to its lemma. Reapplies the table and
    /// rules until nothing changes; the pass cap only cuts off cyclic custom
    /// tables, which the bundled table does not contain.
    pub fn lemmatize(&self, word: &str) -> String {
        let mut current = word.to_lowercase();
        let max_passes = current.chars().count() + 8;
        for _ in 0..max_passes {
            let next = self.step(&current);
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    fn step(&self, w: &str) -> String {
        if let Some(mapped) = self.exceptions.get(w) {
            return mapped.clone();
        }
        let len = w.chars().count();
        if len > 2 && w.ends_with("'s") {
            return w[..w.len() - 2].to_string();
        }
        if len > 1 && w.ends_with('\'') {
            return w[..w.len() - 1].to_string();
        }
        if len >= 5 && w.ends_with("ies") {
            return replace_suffix(w, 3, "y");
        }
        if len >= 5 && w.ends_with("ied") {
            return replace_suffix(w, 3, "y");
        }
        if len >= 6 && w.ends_with("iest") {
            return replace_suffix(w, 4, "y");
        }
        if len >= 5 && w.ends_with("ier") {
            return replace_suffix(w, 3, "y");
        }
        if len >= 5 && ["sses", "xes", "ches", "shes", "oes"].iter().any(|s| w.ends_with(s)) {
            return replace_suffix(w, 2, "");
        }
        if len >= 4 && w.ends_with('s') && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is")
        {
            return replace_suffix(w, 1, "");
        }
        if len >= 6 && w.ends_with("ing") {
            let stem = &w[..w.len() - 3];
            if stem.chars().count() >= 3 && has_vowel(stem) {
                return undoubled(stem);
            }
        }
        if len >= 5 && w.ends_with("ed") {
            let stem = &w[..w.len() - 2];
            if stem.chars().count() >= 3 && has_vowel(stem) {
                return undoubled(stem);
            }
        }
        if len >= 7 && w.ends_with("est") {
            let stem = &w[..w.len() - 3];
            if stem.chars().count() >= 4 {
                return undoubled(stem);
            }
        }
        if len >= 6 && w.ends_with("er") {
            let stem = &w[..w.len() - 2];
            if stem.chars().count() >= 4 {
                return undoubled(stem);
            }
        }
        w.to_string()
    }
}

fn replace_suffix(w: &str, strip: usize, push: &str) -> String {
    let mut s = w[..w.len() - strip].to_string();
    s.push_str(push);
    s
}

fn has_vowel(stem: &str) -> bool {
    stem.chars()
        .any(|c| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y'))
}

/// Drops the second letter of a trailing double consonant produced by
/// suffixation (stopped -> stopp -> stop). Letters that legitimately double
/// at word end (l, s, f: small, less, staff) are left alone.
fn undoubled(stem: &str) -> String {
    let chars: Vec<char> = stem.chars().collect();
    if chars.len() >= 3 {
        let last = chars[chars.len() - 1];
        if last == chars[chars.len() - 2] && matches!(last, 'b' | 'd' | 'g' | 'm' | 'n' | 'p' | 't')
        {
            return chars[..chars.len() - 1].iter().collect();
        }
    }
    stem.to_string()
}

/// Splits text into [`Token`]s according to language.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    lemmatizer: Lemmatizer,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::new()
    }
}

impl Tokenizer {
    /// Tokenizer with the bundled English exception table.
    pub fn new() -> Tokenizer {
        Tokenizer {
            lemmatizer: Lemmatizer::bundled(),
        }
    }

    pub fn with_lemmatizer(lemmatizer: Lemmatizer) -> Tokenizer {
        Tokenizer { lemmatizer }
    }

    pub fn lemmatizer(&self) -> &Lemmatizer {
        &self.lemmatizer
    }

    /// Tokenizes one sentence record.
    pub fn tokenize_sentence(&self, sentence: &SentenceRecord) -> Vec<Token> {
        self.tokenize(&sentence.text, sentence.language)
    }

    /// Chinese: whitespace split of pre-segmented text, lemma = lowercased
    /// surface. English: maximal alphanumeric runs (apostrophes survive
    /// between alphanumerics, curly ones normalised to `'`), lemma from the
    /// rule lemmatizer. Other languages produce no tokens.
    pub fn tokenize(&self, text: &str, language: Language) -> Vec<Token> {
        match language {
            Language::Chinese => text
                .split_whitespace()
                .enumerate()
                .map(|(i, word)| Token {
                    surface: word.to_string(),
                    lemma: word.to_lowercase(),
                    position: i as u32,
                })
                .collect(),
            Language::English => self.tokenize_english(text),
            Language::Other => Vec::new(),
        }
    }

    fn tokenize_english(&self, text: &str) -> Vec<Token> {
        let chars: Vec<char> = text.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            if !chars[i].is_alphanumeric() {
                i += 1;
                continue;
            }
            let mut surface = String::new();
            while i < chars.len() {
                let c = chars[i];
                if c.is_alphanumeric() {
                    surface.push(c);
                    i += 1;
                } else if matches!(c, '\'' | '\u{2019}')
                    && i + 1 < chars.len()
                    && chars[i + 1].is_alphanumeric()
                {
                    surface.push('\'');
                    i += 1;
                } else {
                    break;
                }
            }
            let lemma = self.lemmatizer.lemmatize(&surface);
            tokens.push(Token {
                surface,
                lemma,
                position: tokens.len() as u32,
            });
        }
        tokens
    }
}

/// Sorted, deduplicated lemma vocabulary with ordinal lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Collects the distinct lemmas of `documents` in lexicographic order, so
/// the result is independent of document order.
pub fn build_vocabulary(documents: &[Vec<Token>]) -> Vocabulary {
    let mut terms: Vec<String> = documents
        .iter()
        .flatten()
        .map(|t| t.lemma.clone())
        .collect();
    terms.sort();
    terms.dedup();
    let index = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Vocabulary { terms, index }
}

/// Per-document occurrence counts of one term, split by class. Documents
/// where the term does not occur contribute nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub positive: Vec<u32>,
    pub negative: Vec<u32>,
}

/// Per-term, per-class occurrence counts over a labeled corpus, keyed by
/// lemma.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermClassCounts {
    terms: BTreeMap<String, ClassCounts>,
}

impl TermClassCounts {
    /// Counts lemma occurrences per document and class. Zero counts are
    /// omitted: a term absent from a document leaves no entry for it.
    pub fn from_labeled(documents: &[(Vec<Token>, Sentiment)]) -> TermClassCounts {
        Self::from_docs(documents.iter().map(|(t, l)| (t.as_slice(), *l)))
    }

    /// Borrowing variant of [`from_labeled`] for callers that slice a corpus
    /// into folds without cloning token vectors.
    pub fn from_docs<'a, I>(documents: I) -> TermClassCounts
    where
        I: IntoIterator<Item = (&'a [Token], Sentiment)>,
    {
        let mut terms: BTreeMap<String, ClassCounts> = BTreeMap::new();
        for (tokens, label) in documents {
            let mut per_doc: BTreeMap<&str, u32> = BTreeMap::new();
            for token in tokens {
                *per_doc.entry(token.lemma.as_str()).or_default() += 1;
            }
            for (term, count) in per_doc {
                let entry = terms.entry(term.to_string()).or_default();
                match label {
                    Sentiment::Positive => entry.positive.push(count),
                    Sentiment::Negative => entry.negative.push(count),
                }
            }
        }
        TermClassCounts { terms }
    }

    pub fn get(&self, term: &str) -> Option<&ClassCounts> {
        self.terms.get(term)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ClassCounts)> {
        self.terms.iter().map(|(t, c)| (t.as_str(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lemmas(text: &str, language: Language) -> Vec<String> {
        Tokenizer::new()
            .tokenize(text, language)
            .into_iter()
            .map(|t| t.lemma)
            .collect()
    }

    #[test]
    fn english_tokenization_lowercases_and_lemmatizes() {
        assert_eq!(
            lemmas("The room was very clean!", Language::English),
            ["the", "room", "be", "very", "clean"]
        );
    }

    #[test]
    fn chinese_tokenization_splits_presegmented_text() {
        let tokens = Tokenizer::new().tokenize("酒店 的 服务 很 好", Language::Chinese);
        assert_eq!(tokens.len(), 5);
        assert!(tokens.iter().all(|t| t.surface == t.lemma));
        assert_eq!(tokens[3].lemma, "很");
        assert_eq!(tokens[4].position, 4);
    }

    #[test]
    fn chinese_lowercases_embedded_latin() {
        let tokens = Tokenizer::new().tokenize("WiFi 很 快", Language::Chinese);
        assert_eq!(tokens[0].surface, "WiFi");
        assert_eq!(tokens[0].lemma, "wifi");
    }

    #[test]
    fn apostrophes_survive_between_letters() {
        assert_eq!(
            lemmas("Don’t mind the owner's dog", Language::English),
            ["don't", "mind", "the", "owner", "dog"]
        );
    }

    #[test]
    fn trailing_apostrophes_are_not_token_chars() {
        let tokens = Tokenizer::new().tokenize("the guests' rooms", Language::English);
        assert_eq!(tokens[1].surface, "guests");
        assert_eq!(tokens[1].lemma, "guest");
    }

    #[test]
    fn numbers_are_tokens() {
        assert_eq!(
            lemmas("room 205 was fine", Language::English),
            ["room", "205", "be", "fine"]
        );
    }

    #[test]
    fn other_language_yields_no_tokens() {
        assert!(Tokenizer::new().tokenize("???", Language::Other).is_empty());
    }

    #[test]
    fn positions_count_from_zero() {
        let tokens = Tokenizer::new().tokenize("a b c", Language::English);
        let positions: Vec<u32> = tokens.iter().map(|t| t.position).collect();
        assert_eq!(positions, [0, 1, 2]);
    }

    #[test]
    fn suffix_rules_cover_the_regular_cases() {
        let lem = Lemmatizer::bundled();
        for (form, expected) in [
            ("hotels", "hotel"),
            ("cities", "city"),
            ("dishes", "dish"),
            ("glasses", "glass"),
            ("potatoes", "potato"),
            ("running", "run"),
            ("swimming", "swim"),
            ("stopped", "stop"),
            ("stayed", "stay"),
            ("cleaner", "clean"),
            ("bigger", "big"),
            ("smallest", "small"),
            ("cheapest", "cheap"),
            ("easier", "easy"),
            ("friendliest", "friendly"),
            ("tried", "try"),
            ("prices", "price"),
            ("houses", "house"),
            ("noisier", "noisy"),
        ] {
            assert_eq!(lem.lemmatize(form), expected, "lemmatize({form:?})");
        }
    }

    #[test]
    fn exception_table_beats_the_rules() {
        let lem = Lemmatizer::bundled();
        for (form, expected) in [
            ("was", "be"),
            ("Better", "good"),
            ("worst", "bad"),
            ("went", "go"),
            ("children", "child"),
            ("dinner", "dinner"),
            ("number", "number"),
            ("largest", "large"),
            ("interest", "interest"),
            ("lighting", "lighting"),
            ("dated", "dated"),
        ] {
            assert_eq!(lem.lemmatize(form), expected, "lemmatize({form:?})");
        }
    }

    #[test]
    fn short_words_and_guards_block_overstripping() {
        let lem = Lemmatizer::bundled();
        for word in ["this", "his", "its", "gas", "less", "bus", "spring", "thing", "honest"] {
            assert_eq!(lem.lemmatize(word), word, "{word:?} must not change");
        }
    }

    #[test]
    fn every_table_value_is_a_fixpoint() {
        let lem = Lemmatizer::bundled();
        let repeats: Vec<(String, String)> = BUNDLED_LEMMA_EXCEPTIONS
            .lines()
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let (f, v) = l.split_once('\t').unwrap();
                (f.to_string(), v.to_string())
            })
            .collect();
        assert!(repeats.len() > 200, "expected a substantial table");
        for (form, value) in repeats {
            assert_eq!(
                lem.lemmatize(&value),
                value,
                "table value {value:?} (for {form:?}) must lemmatize to itself"
            );
        }
    }

    #[test]
    fn malformed_tables_are_rejected_with_line_numbers() {
        let err = Lemmatizer::from_tsv("was\tbe\nbroken line\n").unwrap_err();
        match err {
            Error::LemmaTable { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(Lemmatizer::from_tsv("WAS\tbe\n").is_err());
    }

    #[test]
    fn vocabulary_is_sorted_and_deduplicated() {
        let tok = Tokenizer::new();
        let docs = vec![
            tok.tokenize("clean room clean", Language::English),
            tok.tokenize("big room", Language::English),
        ];
        let vocab = build_vocabulary(&docs);
        assert_eq!(vocab.terms(), ["big", "clean", "room"]);
        assert_eq!(vocab.index_of("clean"), Some(1));
        assert_eq!(vocab.index_of("tiny"), None);
    }

    #[test]
    fn term_counts_track_documents_and_omit_zeros() {
        let tok = Tokenizer::new();
        let docs = vec![
            (tok.tokenize("clean clean room", Language::English), Sentiment::Positive),
            (tok.tokenize("clean bed", Language::English), Sentiment::Positive),
            (tok.tokenize("dirty room", Language::English), Sentiment::Negative),
        ];
        let counts = TermClassCounts::from_labeled(&docs);
        let clean = counts.get("clean").unwrap();
        assert_eq!(clean.positive, [2, 1]);
        assert!(clean.negative.is_empty());
        let room = counts.get("room").unwrap();
        assert_eq!(room.positive, [1]);
        assert_eq!(room.negative, [1]);
    }

    #[test]
    fn per_class_counts_sum_to_class_token_totals() {
        let tok = Tokenizer::new();
        let docs: Vec<(Vec<Token>, Sentiment)> = vec![
            (tok.tokenize("a b a c", Language::English), Sentiment::Positive),
            (tok.tokenize("b b d", Language::English), Sentiment::Negative),
            (tok.tokenize("c", Language::English), Sentiment::Positive),
        ];
        let counts = TermClassCounts::from_labeled(&docs);
        let (mut pos_total, mut neg_total) = (0u64, 0u64);
        for (_, c) in counts.iter() {
            pos_total += c.positive.iter().map(|&n| n as u64).sum::<u64>();
            neg_total += c.negative.iter().map(|&n| n as u64).sum::<u64>();
        }
        assert_eq!(pos_total, 5);
        assert_eq!(neg_total, 3);
    }

    proptest! {
        #[test]
        fn lemmatization_is_idempotent(word in "[a-z']{1,20}") {
            let lem = Lemmatizer::bundled();
            let once = lem.lemmatize(&word);
            prop_assert_eq!(lem.lemmatize(&once), once);
        }

        #[test]
        fn vocabulary_ignores_document_order(
            docs in proptest::collection::vec(
                proptest::collection::vec("[a-d]{1,3}", 0..5),
                0..6,
            ),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let tok = Tokenizer::new();
            let tokenized: Vec<Vec<Token>> = docs
                .iter()
                .map(|words| tok.tokenize(&words.join(" "), Language::English))
                .collect();
            let mut shuffled = tokenized.clone();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            shuffled.shuffle(&mut rng);
            prop_assert_eq!(build_vocabulary(&tokenized), build_vocabulary(&shuffled));
        }
    }
}
