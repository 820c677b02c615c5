//! Dependency-parse ingestion and aspect-pair extraction.
//!
//! Parses arrive as CoNLL-U files produced by external tools; this module
//! never tags or parses text itself. Pairing walks `amod` and `nsubj` arcs:
//! an `amod` arc modifies its head noun directly, while `nsubj` links a
//! predicate adjective (or stative verb) back to its subject noun, which is
//! how copular sentences like "The apple is big" surface. Tag admission
//! runs on XPOS by default because the tag tables are Penn / Penn-Chinese
//! sets; a UPOS policy handles treebanks that only carry the universal
//! column.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::corpus::Language;
use crate::error::{Error, Result};

/// One syntactic word from a CoNLL-U token line. All ten columns are kept
/// so that a kept line re-serializes field-for-field; only id, form, lemma,
/// the tag columns, head, and deprel carry meaning here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedToken {
    pub id: u32,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    /// 0 = root.
    pub head: u32,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl ParsedToken {
    /// The deprel with any subtype stripped: "nsubj:pass" → "nsubj".
    pub fn deprel_base(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }

    /// The original 10-column tab-separated line.
    pub fn to_conllu_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.id,
            self.form,
            self.lemma,
            self.upos,
            self.xpos,
            self.feats,
            self.head,
            self.deprel,
            self.deps,
            self.misc,
        )
    }
}

/// One dependency-parsed sentence: its comment lines (verbatim, including
/// the `#`) and its syntactic words. Multiword range lines and empty nodes
/// are dropped during reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    comments: Vec<String>,
    tokens: Vec<ParsedToken>,
    sent_id: Option<String>,
}

impl ParsedSentence {
    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn tokens(&self) -> &[ParsedToken] {
        &self.tokens
    }

    /// The value of a `# sent_id = ...` comment, when present. Parses are
    /// joined back to corpus sentences through this id.
    pub fn sent_id(&self) -> Option<&str> {
        self.sent_id.as_deref()
    }
}

/// Which tag column a policy matches against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagColumn {
    Xpos,
    Upos,
}

/// The part-of-speech gate for pairing: which tags count as
/// adjective-like, verb-like, and noun-like, and which tags disqualify a
/// token outright. The four sets must be pairwise disjoint so that every
/// admitted modifier has exactly one class and the filter can never
/// contradict an admission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagPolicy {
    adjective_tags: BTreeSet<String>,
    verb_tags: BTreeSet<String>,
    noun_tags: BTreeSet<String>,
    filter_tags: BTreeSet<String>,
    column: TagColumn,
}

fn tag_set(tags: &[&str]) -> BTreeSet<String> {
    tags.iter().map(|t| t.to_string()).collect()
}

impl TagPolicy {
    pub fn new(
        adjective_tags: BTreeSet<String>,
        verb_tags: BTreeSet<String>,
        noun_tags: BTreeSet<String>,
        filter_tags: BTreeSet<String>,
        column: TagColumn,
    ) -> Result<Self> {
        let named: [(&str, &BTreeSet<String>); 4] = [
            ("adjective", &adjective_tags),
            ("verb", &verb_tags),
            ("noun", &noun_tags),
            ("filter", &filter_tags),
        ];
        for (i, (name_a, set_a)) in named.iter().enumerate() {
            for (name_b, set_b) in &named[i + 1..] {
                if let Some(tag) = set_a.intersection(set_b).next() {
                    return Err(Error::TagPolicyOverlap {
                        tag: tag.clone(),
                        a: name_a,
                        b: name_b,
                    });
                }
            }
        }
        Ok(Self {
            adjective_tags,
            verb_tags,
            noun_tags,
            filter_tags,
            column,
        })
    }

    /// Penn Chinese Treebank policy.
    pub fn chinese() -> Self {
        Self::new(
            tag_set(&["VA", "JJ"]),
            tag_set(&["VV"]),
            tag_set(&["NN"]),
            tag_set(&["DT", "PN", "CD", "PU", "DEV", "NR", "M", "SP", "IJ"]),
            TagColumn::Xpos,
        )
        .expect("built-in Chinese tag sets are disjoint")
    }

    /// Penn Treebank policy.
    pub fn english() -> Self {
        Self::new(
            tag_set(&["JJ", "JJS", "JJR"]),
            tag_set(&["VB", "VBP", "VBN", "VBG"]),
            tag_set(&["NN", "NNS"]),
            tag_set(&["DT", "PN", "CD", "PU", "NNP", "PRP$", "WP"]),
            TagColumn::Xpos,
        )
        .expect("built-in English tag sets are disjoint")
    }

    /// Universal-tag policy for treebanks whose XPOS column is empty.
    pub fn upos() -> Self {
        Self::new(
            tag_set(&["ADJ"]),
            tag_set(&["VERB"]),
            tag_set(&["NOUN"]),
            tag_set(&["DET", "PRON", "NUM", "PUNCT", "PROPN", "INTJ"]),
            TagColumn::Upos,
        )
        .expect("built-in universal tag sets are disjoint")
    }

    /// The default XPOS policy for a corpus language.
    pub fn for_language(language: Language) -> Self {
        match language {
            Language::Chinese => Self::chinese(),
            Language::English | Language::Other => Self::english(),
        }
    }

    pub fn adjective_tags(&self) -> &BTreeSet<String> {
        &self.adjective_tags
    }

    pub fn verb_tags(&self) -> &BTreeSet<String> {
        &self.verb_tags
    }

    pub fn noun_tags(&self) -> &BTreeSet<String> {
        &self.noun_tags
    }

    pub fn filter_tags(&self) -> &BTreeSet<String> {
        &self.filter_tags
    }

    pub fn column(&self) -> TagColumn {
        self.column
    }

    fn tag_of<'t>(&self, token: &'t ParsedToken) -> &'t str {
        match self.column {
            TagColumn::Xpos => &token.xpos,
            TagColumn::Upos => &token.upos,
        }
    }
}

/// Which arc produced a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeprelSource {
    Amod,
    Nsubj,
}

impl DeprelSource {
    pub fn code(self) -> &'static str {
        match self {
            DeprelSource::Amod => "amod",
            DeprelSource::Nsubj => "nsubj",
        }
    }
}

impl fmt::Display for DeprelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Whether the admitted modifier carried an adjective or a verb tag. Kept
/// separate so downstream tables can group predicative verbs apart from
/// plain adjectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModifierClass {
    Adjective,
    Verb,
}

/// An (adjective-like, noun) pair lifted off one dependency arc. The
/// modifier and noun are keyed by lemma for English and by surface form
/// for Chinese, matching how the per-language rankings count words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectPair {
    pub modifier: String,
    pub noun: String,
    pub deprel_source: DeprelSource,
    pub modifier_class: ModifierClass,
    /// The sentence's `sent_id`, empty when the parse carries none.
    pub sentence_ref: String,
}

/// Reads every sentence of a CoNLL-U file.
pub fn read_conllu(path: impl AsRef<Path>) -> Result<Vec<ParsedSentence>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(BufReader::new(file))
}

/// Parses CoNLL-U text: sentences separated by blank lines, `#` comment
/// lines kept verbatim, 10-column token lines. Multiword range ids
/// ("1-2") and empty-node ids ("3.1") are skipped; other malformed lines
/// are errors carrying their 1-based line number.
pub fn parse_conllu<R: BufRead>(reader: R) -> Result<Vec<ParsedSentence>> {
    let mut sentences = Vec::new();
    let mut comments: Vec<String> = Vec::new();
    let mut tokens: Vec<ParsedToken> = Vec::new();
    let mut seen_ids: BTreeSet<u32> = BTreeSet::new();

    let flush = |comments: &mut Vec<String>,
                 tokens: &mut Vec<ParsedToken>,
                 seen_ids: &mut BTreeSet<u32>,
                 sentences: &mut Vec<ParsedSentence>| {
        if !tokens.is_empty() {
            let sent_id = comments.iter().find_map(|c| parse_sent_id(c)).map(String::from);
            sentences.push(ParsedSentence {
                comments: std::mem::take(comments),
                tokens: std::mem::take(tokens),
                sent_id,
            });
        } else {
            comments.clear();
        }
        seen_ids.clear();
    };

    for (number, line) in reader.lines().enumerate() {
        let number = number + 1;
        let line = line.map_err(|e| Error::Conllu {
            line: number,
            message: format!("read failed: {e}"),
        })?;
        if line.trim().is_empty() {
            flush(&mut comments, &mut tokens, &mut seen_ids, &mut sentences);
            continue;
        }
        if line.starts_with('#') {
            comments.push(line);
            continue;
        }
        if let Some(token) = parse_token_line(&line, number, &mut seen_ids)? {
            tokens.push(token);
        }
    }
    flush(&mut comments, &mut tokens, &mut seen_ids, &mut sentences);
    Ok(sentences)
}

fn parse_sent_id(comment: &str) -> Option<&str> {
    let rest = comment.strip_prefix('#')?.trim_start();
    let rest = rest.strip_prefix("sent_id")?.trim_start();
    Some(rest.strip_prefix('=')?.trim())
}

/// Parses one token line; `Ok(None)` for range and empty-node lines.
fn parse_token_line(
    line: &str,
    number: usize,
    seen_ids: &mut BTreeSet<u32>,
) -> Result<Option<ParsedToken>> {
    let err = |message: String| Error::Conllu {
        line: number,
        message,
    };
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 10 {
        return Err(err(format!(
            "expected 10 tab-separated columns, found {}",
            fields.len()
        )));
    }
    // Range lines ("1-2") cover tokens that follow individually; empty
    // nodes ("3.1") sit outside the basic dependency tree. Neither joins
    // the sentence.
    if fields[0].contains('-') || fields[0].contains('.') {
        return Ok(None);
    }
    let id: u32 = fields[0]
        .parse()
        .map_err(|_| err(format!("token id {:?} is not an integer", fields[0])))?;
    if id == 0 {
        return Err(err("token id must be positive".into()));
    }
    if !seen_ids.insert(id) {
        return Err(err(format!("duplicate token id {id}")));
    }
    let head: u32 = fields[6]
        .parse()
        .map_err(|_| err(format!("head {:?} is not an integer", fields[6])))?;
    if head == id {
        return Err(err(format!("token {id} names itself as head")));
    }
    Ok(Some(ParsedToken {
        id,
        form: fields[1].to_string(),
        lemma: fields[2].to_string(),
        upos: fields[3].to_string(),
        xpos: fields[4].to_string(),
        feats: fields[5].to_string(),
        head,
        deprel: fields[7].to_string(),
        deps: fields[8].to_string(),
        misc: fields[9].to_string(),
    }))
}

/// Walks the sentence's arcs in dependent order and emits every admitted
/// (modifier, noun) pair. An `amod` dependent modifies its head noun; an
/// `nsubj` head (the predicate) modifies its dependent noun. A candidate
/// survives only when the modifier carries an adjective or verb tag, the
/// noun carries a noun tag, and neither carries a filtered tag. Subtyped
/// deprels ("nsubj:pass") count as their base label. Arcs whose head falls
/// outside the sentence produce nothing.
pub fn extract_pairs(
    sentence: &ParsedSentence,
    policy: &TagPolicy,
    language: Language,
) -> Vec<AspectPair> {
    let by_id: HashMap<u32, &ParsedToken> =
        sentence.tokens().iter().map(|t| (t.id, t)).collect();
    let sentence_ref = sentence.sent_id().unwrap_or("").to_string();
    let key = |token: &ParsedToken| match language {
        Language::Chinese => token.form.clone(),
        Language::English | Language::Other => token.lemma.clone(),
    };

    let mut pairs = Vec::new();
    for token in sentence.tokens() {
        let source = match token.deprel_base() {
            "amod" => DeprelSource::Amod,
            "nsubj" => DeprelSource::Nsubj,
            _ => continue,
        };
        if token.head == 0 {
            continue;
        }
        let Some(&head) = by_id.get(&token.head) else {
            continue;
        };
        let (modifier, noun) = match source {
            DeprelSource::Amod => (token, head),
            DeprelSource::Nsubj => (head, token),
        };
        let modifier_tag = policy.tag_of(modifier);
        let noun_tag = policy.tag_of(noun);
        let modifier_class = if policy.adjective_tags.contains(modifier_tag) {
            ModifierClass::Adjective
        } else if policy.verb_tags.contains(modifier_tag) {
            ModifierClass::Verb
        } else {
            continue;
        };
        if !policy.noun_tags.contains(noun_tag) {
            continue;
        }
        if policy.filter_tags.contains(modifier_tag) || policy.filter_tags.contains(noun_tag) {
            continue;
        }
        pairs.push(AspectPair {
            modifier: key(modifier),
            noun: key(noun),
            deprel_source: source,
            modifier_class,
            sentence_ref: sentence_ref.clone(),
        });
    }
    pairs
}

/// One row of the pair dump TSV. The modifier class is not part of the
/// dump format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRecord {
    pub modifier: String,
    pub noun: String,
    pub deprel_source: DeprelSource,
    pub sentence_ref: String,
}

/// Writes pairs as `modifier<TAB>noun<TAB>deprel<TAB>sentence_id` lines.
pub fn write_pairs<W: Write>(writer: &mut W, pairs: &[AspectPair]) -> std::io::Result<()> {
    for pair in pairs {
        writeln!(
            writer,
            "{}\t{}\t{}\t{}",
            pair.modifier, pair.noun, pair.deprel_source, pair.sentence_ref
        )?;
    }
    Ok(())
}

/// Reads a pair dump back. Errors carry 1-based line numbers.
pub fn read_pairs<R: BufRead>(reader: R) -> Result<Vec<PairRecord>> {
    let mut records = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let number = number + 1;
        let err = |message: String| Error::PairFormat {
            line: number,
            message,
        };
        let line = line.map_err(|e| err(format!("read failed: {e}")))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(format!(
                "expected 4 tab-separated columns, found {}",
                fields.len()
            )));
        }
        let deprel_source = match fields[2] {
            "amod" => DeprelSource::Amod,
            "nsubj" => DeprelSource::Nsubj,
            other => return Err(err(format!("unknown deprel {other:?}"))),
        };
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(err("empty modifier or noun".into()));
        }
        records.push(PairRecord {
            modifier: fields[0].to_string(),
            noun: fields[1].to_string(),
            deprel_source,
            sentence_ref: fields[3].to_string(),
        });
    }
    Ok(records)
}
