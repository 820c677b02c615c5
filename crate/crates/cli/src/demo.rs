//! Synthetic demo corpus with a planted lexicon.
//!
//! The generator fabricates two language slices — one Han-script, one
//! Latin-script — whose opinion structure is known by construction: each
//! sentence carries exactly one planted sentiment adjective, adjectives
//! have a dominant partner noun they modify 70% of the time, and a pool
//! of class-balanced noise words pads every sentence. That makes the
//! interesting checks decidable: keyword selection should recover the
//! planted adjectives, the classifier should separate the classes, and
//! each adjective's top pairs should surface its dominant noun.
//!
//! Everything is derived from one seed, so a given (seed, size) always
//! produces byte-identical files. Latin pseudo-words are required to be
//! lemmatizer fixpoints — a planted word that the lemmatizer rewrites
//! would break the correspondence between text and ground truth.

use crate::error::{CliError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use review_miner_core::{Language, Sentiment, Tokenizer};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SENTENCES: usize = 300;
pub const DEFAULT_TRAINING_ROWS: usize = 240;

const ADJECTIVES_PER_CLASS: usize = 20;
const NOUNS: usize = 12;
const NOISE_WORDS: usize = 200;
const DISTRACTORS: usize = 8;
const HOTELS: usize = 20;
/// Chance that a planted adjective pairs with its dominant noun.
const DOMINANT_NOUN_PCT: u32 = 70;

#[derive(Debug, Clone, Copy)]
pub struct DemoSpec {
    pub seed: u64,
    /// Unlabeled corpus sentences per language.
    pub sentences: usize,
    /// Labeled training rows per language.
    pub training_rows: usize,
}

impl Default for DemoSpec {
    fn default() -> Self {
        DemoSpec {
            seed: DEFAULT_SEED,
            sentences: DEFAULT_SENTENCES,
            training_rows: DEFAULT_TRAINING_ROWS,
        }
    }
}

/// Ground truth for one planted adjective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedWord {
    pub language: Language,
    pub sentiment: Sentiment,
    pub adjective: String,
    pub dominant_noun: String,
}

struct Vocabulary {
    language: Language,
    positive: Vec<String>,
    negative: Vec<String>,
    nouns: Vec<String>,
    noise: Vec<String>,
    /// Lowercase; capitalized at use in the Latin slice, tagged as proper
    /// nouns in the parses so the pair filter drops them.
    distractors: Vec<String>,
}

impl Vocabulary {
    fn adjectives(&self, sentiment: Sentiment) -> &[String] {
        match sentiment {
            Sentiment::Positive => &self.positive,
            Sentiment::Negative => &self.negative,
        }
    }

    fn dominant_noun(&self, adjective_index: usize) -> &str {
        &self.nouns[adjective_index % self.nouns.len()]
    }
}

const HAN_POOL: [char; 40] = [
    '安', '宝', '长', '晨', '春', '德', '东', '风', '福', '干', '光', '海', '和', '河', '湖',
    '花', '佳', '金', '锦', '静', '康', '乐', '林', '美', '明', '宁', '平', '清', '泉', '日',
    '山', '水', '天', '温', '西', '香', '雅', '阳', '云', '紫',
];

const ONSETS: [&str; 20] = [
    "b", "br", "d", "dr", "f", "fl", "g", "gr", "k", "kl", "l", "m", "n", "p", "pr", "s", "t",
    "tr", "v", "z",
];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
const CODAS: [&str; 6] = ["", "l", "n", "r", "m", "k"];

/// Draws distinct 2-character Han pseudo-words.
fn han_words(rng: &mut ChaCha8Rng, count: usize, taken: &mut BTreeSet<String>) -> Vec<String> {
    let mut words = Vec::with_capacity(count);
    while words.len() < count {
        let a = HAN_POOL[rng.random_range(0..HAN_POOL.len())];
        let b = HAN_POOL[rng.random_range(0..HAN_POOL.len())];
        let word: String = [a, b].iter().collect();
        if taken.insert(word.clone()) {
            words.push(word);
        }
    }
    words
}

/// Draws distinct Latin pseudo-words that the lemmatizer maps to
/// themselves.
fn latin_words(
    rng: &mut ChaCha8Rng,
    count: usize,
    taken: &mut BTreeSet<String>,
    tokenizer: &Tokenizer,
) -> Vec<String> {
    let mut words = Vec::with_capacity(count);
    while words.len() < count {
        let mut word = String::new();
        for _ in 0..2 {
            word.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
            word.push_str(VOWELS[rng.random_range(0..VOWELS.len())]);
        }
        word.push_str(CODAS[rng.random_range(0..CODAS.len())]);
        let tokens = tokenizer.tokenize(&word, Language::English);
        let is_fixpoint = tokens.len() == 1 && tokens[0].lemma == word;
        if is_fixpoint && taken.insert(word.clone()) {
            words.push(word);
        }
    }
    words
}

fn build_vocabulary(language: Language, rng: &mut ChaCha8Rng, tokenizer: &Tokenizer) -> Vocabulary {
    let mut taken = BTreeSet::new();
    let draw = |count: usize, rng: &mut ChaCha8Rng, taken: &mut BTreeSet<String>| match language {
        Language::Chinese => han_words(rng, count, taken),
        _ => latin_words(rng, count, taken, tokenizer),
    };
    Vocabulary {
        language,
        positive: draw(ADJECTIVES_PER_CLASS, rng, &mut taken),
        negative: draw(ADJECTIVES_PER_CLASS, rng, &mut taken),
        nouns: draw(NOUNS, rng, &mut taken),
        noise: draw(NOISE_WORDS, rng, &mut taken),
        distractors: draw(DISTRACTORS, rng, &mut taken),
    }
}

/// One generated sentence: its surface text, its dependency parse rows
/// (CoNLL-U token lines, without the sent_id comment), and the sentiment
/// it was flavored with.
struct DemoSentence {
    text: String,
    conllu_rows: Vec<String>,
    sentiment: Sentiment,
}

fn token_row(
    id: usize,
    form: &str,
    lemma: &str,
    upos: &str,
    xpos: &str,
    head: usize,
    deprel: &str,
) -> String {
    format!("{id}\t{form}\t{lemma}\t{upos}\t{xpos}\t_\t{head}\t{deprel}\t_\t_")
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Builds one flavored sentence. `adjective_index` cycles per class so
/// every planted adjective gets even coverage.
fn make_sentence(
    vocab: &Vocabulary,
    sentiment: Sentiment,
    adjective_index: usize,
    rng: &mut ChaCha8Rng,
) -> DemoSentence {
    let adjectives = vocab.adjectives(sentiment);
    let adjective = &adjectives[adjective_index % adjectives.len()];
    let noun = if rng.random_range(0..100) < DOMINANT_NOUN_PCT {
        vocab.dominant_noun(adjective_index % adjectives.len()).to_string()
    } else {
        let dominant = vocab.dominant_noun(adjective_index % adjectives.len());
        loop {
            let candidate = &vocab.nouns[rng.random_range(0..vocab.nouns.len())];
            if candidate != dominant {
                break candidate.clone();
            }
        }
    };
    let noise: Vec<&String> = (0..rng.random_range(1..=3))
        .map(|_| &vocab.noise[rng.random_range(0..vocab.noise.len())])
        .collect();

    // 45% attributive (amod), 45% predicative (nsubj), 10% proper-noun
    // subject — the last yields no pair because the subject is filtered.
    let template = rng.random_range(0..20);
    let zh = vocab.language == Language::Chinese;
    let mut words: Vec<String> = Vec::new();
    let mut rows: Vec<String> = Vec::new();
    if template < 9 {
        // Attributive: [the] adj noun noise*
        if zh {
            words.push(adjective.clone());
            words.push(noun.clone());
            rows.push(token_row(1, adjective, adjective, "ADJ", "JJ", 2, "amod"));
            rows.push(token_row(2, &noun, &noun, "NOUN", "NN", 0, "root"));
            for (i, w) in noise.iter().enumerate() {
                words.push((*w).clone());
                rows.push(token_row(3 + i, w, w, "ADV", "AD", 2, "dep"));
            }
        } else {
            words.push("the".into());
            words.push(adjective.clone());
            words.push(noun.clone());
            rows.push(token_row(1, "the", "the", "DET", "DT", 3, "det"));
            rows.push(token_row(2, adjective, adjective, "ADJ", "JJ", 3, "amod"));
            rows.push(token_row(3, &noun, &noun, "NOUN", "NN", 0, "root"));
            for (i, w) in noise.iter().enumerate() {
                words.push((*w).clone());
                rows.push(token_row(4 + i, w, w, "ADV", "RB", 3, "dep"));
            }
        }
    } else if template < 18 {
        // Predicative: [the] noun [is] adj noise*
        if zh {
            words.push(noun.clone());
            words.push(adjective.clone());
            rows.push(token_row(1, &noun, &noun, "NOUN", "NN", 2, "nsubj"));
            rows.push(token_row(2, adjective, adjective, "ADJ", "VA", 0, "root"));
            for (i, w) in noise.iter().enumerate() {
                words.push((*w).clone());
                rows.push(token_row(3 + i, w, w, "ADV", "AD", 2, "dep"));
            }
        } else {
            words.push("the".into());
            words.push(noun.clone());
            words.push("is".into());
            words.push(adjective.clone());
            rows.push(token_row(1, "the", "the", "DET", "DT", 2, "det"));
            rows.push(token_row(2, &noun, &noun, "NOUN", "NN", 4, "nsubj"));
            rows.push(token_row(3, "is", "be", "AUX", "VBZ", 4, "cop"));
            rows.push(token_row(4, adjective, adjective, "ADJ", "JJ", 0, "root"));
            for (i, w) in noise.iter().enumerate() {
                words.push((*w).clone());
                rows.push(token_row(5 + i, w, w, "ADV", "RB", 4, "dep"));
            }
        }
    } else {
        // Proper-noun subject: filtered, so no pair comes out of it.
        let name = &vocab.distractors[rng.random_range(0..vocab.distractors.len())];
        if zh {
            words.push(name.clone());
            words.push(adjective.clone());
            rows.push(token_row(1, name, name, "PROPN", "NR", 2, "nsubj"));
            rows.push(token_row(2, adjective, adjective, "ADJ", "VA", 0, "root"));
        } else {
            let cap = capitalize(name);
            words.push(cap.clone());
            words.push("is".into());
            words.push(adjective.clone());
            rows.push(token_row(1, &cap, name, "PROPN", "NNP", 3, "nsubj"));
            rows.push(token_row(2, "is", "be", "AUX", "VBZ", 3, "cop"));
            rows.push(token_row(3, adjective, adjective, "ADJ", "JJ", 0, "root"));
        }
    }

    DemoSentence {
        text: words.join(" "),
        conllu_rows: rows,
        sentiment,
    }
}

struct Hotel {
    id: String,
    name: String,
    price_low: u32,
    price_high: u32,
}

/// Hotels priced to cover every concrete bin from 2,500 JPY up. The two
/// sources share names (so the hotel matcher pairs them) but not ids; the
/// final hotel of each source exists on that side only.
fn build_hotels(side: &str, names: &[String]) -> Vec<Hotel> {
    // Mid-bin price points for bins 3..=9.
    const PRICE_POINTS: [(u32, u32); 7] = [
        (5_000, 7_400),
        (10_000, 14_000),
        (15_000, 19_000),
        (20_000, 28_000),
        (30_000, 45_000),
        (50_000, 90_000),
        (100_000, 180_000),
    ];
    names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let (low, high) = PRICE_POINTS[i % PRICE_POINTS.len()];
            Hotel {
                id: format!("{side}-h{i:03}"),
                name: name.clone(),
                price_low: low,
                price_high: high,
            }
        })
        .collect()
}

fn attribution_triple(index: usize) -> (&'static str, &'static str, &'static str) {
    // Exact quarter fractions summing to 1.
    const TRIPLES: [(&str, &str, &str); 8] = [
        ("1", "0", "0"),
        ("0.5", "0.25", "0.25"),
        ("0.25", "0.5", "0.25"),
        ("0", "1", "0"),
        ("0.75", "0.25", "0"),
        ("0", "0", "1"),
        ("0.25", "0.75", "0"),
        ("0", "0.75", "0.25"),
    ];
    TRIPLES[index % TRIPLES.len()]
}

/// Generates one language slice into `out`. Returns the planted truth.
fn generate_language(
    spec: &DemoSpec,
    language: Language,
    hotel_names: &[String],
    out: &Path,
    rng: &mut ChaCha8Rng,
    tokenizer: &Tokenizer,
) -> Result<Vec<PlantedWord>> {
    let code = language.code();
    let vocab = build_vocabulary(language, rng, tokenizer);
    let hotels = build_hotels(code, hotel_names);

    // Unlabeled corpus: reviews of 4-7 sentences, alternating flavor,
    // round-robin adjectives within each class.
    let mut reviews_jsonl = String::new();
    let mut conllu = String::new();
    let mut produced = 0usize;
    let mut review_no = 0usize;
    let mut adjective_cursor = [0usize; 2];
    while produced < spec.sentences {
        let review_id = format!("{code}-r{review_no:04}");
        let count = rng.random_range(4..=7).min(spec.sentences - produced);
        let mut sentences = Vec::with_capacity(count);
        for index in 0..count {
            let sentiment = if rng.random_range(0..2) == 0 {
                Sentiment::Positive
            } else {
                Sentiment::Negative
            };
            let slot = (sentiment == Sentiment::Negative) as usize;
            let sentence = make_sentence(&vocab, sentiment, adjective_cursor[slot], rng);
            adjective_cursor[slot] += 1;
            let _ = writeln!(conllu, "# sent_id = {review_id}:{index}");
            for row in &sentence.conllu_rows {
                let _ = writeln!(conllu, "{row}");
            }
            conllu.push('\n');
            sentences.push(sentence.text);
        }
        produced += count;

        let hotel = &hotels[rng.random_range(0..hotels.len())];
        let date = chrono::NaiveDate::from_ymd_opt(2014, 1, 1).unwrap()
            + chrono::Days::new((review_no as u64 * 3) % 700);
        let text = match language {
            Language::Chinese => format!("{}。", sentences.join("。")),
            _ => format!("{}.", sentences.join(". ")),
        };
        let record = serde_json::json!({
            "id": review_id,
            "hotel_id": hotel.id,
            "hotel_name_en": hotel.name,
            "date": date.to_string(),
            "price_low_jpy": hotel.price_low,
            "price_high_jpy": hotel.price_high,
            "lang": code,
            "text": text,
        });
        let _ = writeln!(reviews_jsonl, "{record}");
        review_no += 1;
    }

    // Labeled training rows, alternating class, round-robin adjectives.
    let mut training = String::new();
    let mut training_cursor = [0usize; 2];
    for i in 0..spec.training_rows {
        let sentiment = if i % 2 == 0 {
            Sentiment::Positive
        } else {
            Sentiment::Negative
        };
        let slot = (sentiment == Sentiment::Negative) as usize;
        let sentence = make_sentence(&vocab, sentiment, training_cursor[slot], rng);
        training_cursor[slot] += 1;
        let _ = writeln!(training, "{}\t{}", sentence.sentiment.code(), sentence.text);
    }

    // Attribute lexicon: every lemma that can appear in a token stream,
    // so no ranking can step outside it.
    let mut lemmas: BTreeSet<String> = BTreeSet::new();
    let all_words = vocab
        .positive
        .iter()
        .chain(&vocab.negative)
        .chain(&vocab.nouns)
        .chain(&vocab.noise)
        .chain(&vocab.distractors)
        .cloned()
        .chain(if language == Language::Chinese {
            Vec::new()
        } else {
            vec!["the".to_string(), "is".to_string()]
        });
    for word in all_words {
        for token in tokenizer.tokenize(&word, language) {
            lemmas.insert(token.lemma);
        }
    }
    let mut lexicon = String::new();
    for (i, lemma) in lemmas.iter().enumerate() {
        let (hard, soft, undefined) = attribution_triple(i);
        let _ = writeln!(lexicon, "{lemma}\t{hard}\t{soft}\t{undefined}");
    }

    let writes = [
        (format!("reviews_{code}.jsonl"), reviews_jsonl),
        (format!("parses_{code}.conllu"), conllu),
        (format!("training_{code}.tsv"), training),
        (format!("lexicon_{code}.tsv"), lexicon),
    ];
    for (name, content) in writes {
        let path = out.join(name);
        fs::write(&path, content)
            .map_err(|e| CliError::output(path.display().to_string(), e))?;
    }

    let mut truth = Vec::new();
    for sentiment in [Sentiment::Positive, Sentiment::Negative] {
        for (i, adjective) in vocab.adjectives(sentiment).iter().enumerate() {
            truth.push(PlantedWord {
                language,
                sentiment,
                adjective: adjective.clone(),
                dominant_noun: vocab.dominant_noun(i).to_string(),
            });
        }
    }
    Ok(truth)
}

/// Generates the full demo corpus: both language slices, a ground-truth
/// file, and a ready-to-run config.
pub fn generate(spec: &DemoSpec, out: &Path) -> Result<Vec<PlantedWord>> {
    fs::create_dir_all(out).map_err(|e| CliError::output(out.display().to_string(), e))?;
    let tokenizer = Tokenizer::new();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Shared hotel names, Latin for both sources. One extra name per side
    // stays unmatched, which keeps the hotel-join diagnostics honest.
    let mut name_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x4047_3031);
    let mut taken = BTreeSet::new();
    let name_words = latin_words(&mut name_rng, HOTELS + 2, &mut taken, &tokenizer);
    let names: Vec<String> = name_words
        .iter()
        .map(|w| format!("Hotel {}", capitalize(w)))
        .collect();
    let shared = &names[..HOTELS];
    let mut zh_names: Vec<String> = shared.to_vec();
    zh_names.push(names[HOTELS].clone());
    let mut en_names: Vec<String> = shared.to_vec();
    en_names.push(names[HOTELS + 1].clone());

    let mut truth = generate_language(
        spec,
        Language::Chinese,
        &zh_names,
        out,
        &mut rng,
        &tokenizer,
    )?;
    truth.extend(generate_language(
        spec,
        Language::English,
        &en_names,
        out,
        &mut rng,
        &tokenizer,
    )?);

    let mut truth_text = String::new();
    for word in &truth {
        let _ = writeln!(
            truth_text,
            "{}\t{}\t{}\t{}",
            word.language.code(),
            word.sentiment.code(),
            word.adjective,
            word.dominant_noun
        );
    }

    let config = format!(
        "# Generated demo corpus (seed {seed}).\n\
         reviews_zh = reviews_zh.jsonl\n\
         reviews_en = reviews_en.jsonl\n\
         parses_zh = parses_zh.conllu\n\
         parses_en = parses_en.conllu\n\
         training_zh = training_zh.tsv\n\
         training_en = training_en.tsv\n\
         lexicon_zh = lexicon_zh.tsv\n\
         lexicon_en = lexicon_en.tsv\n\
         # Reduced sweep keeps the end-to-end run fast.\n\
         alpha_grid = 1.5,2.5,3.5\n\
         alpha_prime_grid = 1.5,2.5,3.5\n\
         c_grid = 0.5,1\n\
         k_zh = 5\n\
         k_en = 5\n\
         seed = {seed}\n\
         output_dir = out\n",
        seed = spec.seed
    );

    for (name, content) in [("truth.tsv", truth_text), ("demo.conf", config)] {
        let path = out.join(name);
        fs::write(&path, content)
            .map_err(|e| CliError::output(path.display().to_string(), e))?;
    }
    Ok(truth)
}

/// Reads a truth file back (for tests and acceptance checks).
pub fn read_truth(path: &Path) -> Result<Vec<PlantedWord>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut words = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(CliError::Config(format!(
                "truth file line {}: expected 4 columns",
                number + 1
            )));
        }
        let language = match fields[0] {
            "zh" => Language::Chinese,
            "en" => Language::English,
            other => {
                return Err(CliError::Config(format!(
                    "truth file line {}: unknown language {other:?}",
                    number + 1
                )));
            }
        };
        let sentiment = Sentiment::from_code(fields[1]).ok_or_else(|| {
            CliError::Config(format!("truth file line {}: bad sentiment", number + 1))
        })?;
        words.push(PlantedWord {
            language,
            sentiment,
            adjective: fields[2].to_string(),
            dominant_noun: fields[3].to_string(),
        });
    }
    Ok(words)
}
