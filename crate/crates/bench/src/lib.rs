//! Deterministic synthetic inputs shared by the benchmark targets. Sizes
//! are chosen to resemble a mid-sized review corpus rather than to stress
//! allocators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use review_miner_core::classifier::FeatureVector;
use review_miner_core::{Sentiment, Token};
use std::fmt::Write;

const SEED: u64 = 20_260_816;

fn vocabulary(size: usize) -> Vec<String> {
    let onsets = ["b", "br", "cl", "d", "fr", "g", "gr", "l", "m", "n", "p", "pl", "s", "st", "tr", "v"];
    let vowels = ["a", "e", "i", "o", "u"];
    let codas = ["", "n", "r", "st", "m", "l"];
    let mut words = Vec::with_capacity(size);
    'outer: for first in onsets {
        for vowel in vowels {
            for coda in codas {
                for second in vowels {
                    words.push(format!("{first}{vowel}{coda}{second}ne"));
                    if words.len() == size {
                        break 'outer;
                    }
                }
            }
        }
    }
    assert_eq!(words.len(), size, "vocabulary template too small for {size}");
    words
}

/// Labeled tokenized documents with a mild class skew per term, so the
/// entropy table is neither flat nor degenerate.
pub fn labeled_documents(documents: usize, vocabulary_size: usize) -> Vec<(Vec<Token>, Sentiment)> {
    let words = vocabulary(vocabulary_size);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..documents)
        .map(|i| {
            let label = if i % 2 == 0 { Sentiment::Positive } else { Sentiment::Negative };
            let length = rng.random_range(8..=40);
            let tokens = (0..length)
                .map(|position| {
                    // Even words lean positive, odd words negative.
                    let bucket = rng.random_range(0..vocabulary_size / 2) * 2;
                    let index = match (label, rng.random_bool(0.7)) {
                        (Sentiment::Positive, true) | (Sentiment::Negative, false) => bucket,
                        _ => bucket + 1,
                    };
                    Token {
                        surface: words[index].clone(),
                        lemma: words[index].clone(),
                        position,
                    }
                })
                .collect();
            (tokens, label)
        })
        .collect()
}

/// A dense-ish linearly structured training problem.
pub fn training_problem(samples: usize, dim: usize) -> (Vec<FeatureVector>, Vec<Sentiment>) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for i in 0..samples {
        let label = if i % 2 == 0 { Sentiment::Positive } else { Sentiment::Negative };
        let entries: Vec<(usize, u32)> = (0..dim)
            .filter_map(|ordinal| {
                let leaning = (ordinal % 2 == 0) == (label == Sentiment::Positive);
                let ceiling = if leaning { 4 } else { 2 };
                let count = rng.random_range(0..=ceiling);
                (count > 0).then_some((ordinal, count))
            })
            .collect();
        xs.push(FeatureVector::new(dim, entries));
        ys.push(label);
    }
    (xs, ys)
}

/// Plain English-like running text, `words` words long.
pub fn english_text(words: usize) -> String {
    let vocabulary = vocabulary(120);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut text = String::new();
    for i in 0..words {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(&vocabulary[rng.random_range(0..vocabulary.len())]);
        if rng.random_bool(0.08) {
            text.push('.');
        }
    }
    text
}

/// Pre-segmented text in the space-separated form the Chinese path expects.
pub fn segmented_text(words: usize) -> String {
    let glyphs = ["房", "间", "很", "大", "干", "净", "好", "服", "务", "早", "餐", "丰", "富"];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let mut text = String::new();
    for i in 0..words {
        if i > 0 {
            text.push(' ');
        }
        let length = rng.random_range(1..=2);
        for _ in 0..length {
            text.push_str(glyphs[rng.random_range(0..glyphs.len())]);
        }
    }
    text
}

/// A syntactically valid CoNLL-U document of simple five-token clauses,
/// each carrying one amod and one nsubj relation.
pub fn conllu_document(sentences: usize) -> String {
    let adjectives = ["clean", "big", "nice", "dirty", "old", "new", "quiet", "bright"];
    let nouns = ["room", "staff", "pool", "view", "bed", "lobby", "bathroom", "breakfast"];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut document = String::new();
    for i in 0..sentences {
        let adjective = adjectives[rng.random_range(0..adjectives.len())];
        let noun = nouns[rng.random_range(0..nouns.len())];
        let other = nouns[rng.random_range(0..nouns.len())];
        writeln!(document, "# sent_id = bench:{i}").unwrap();
        writeln!(document, "# text = The {adjective} {noun} is {other}").unwrap();
        writeln!(document, "1\tThe\tthe\tDET\tDT\t_\t3\tdet\t_\t_").unwrap();
        writeln!(document, "2\t{adjective}\t{adjective}\tADJ\tJJ\t_\t3\tamod\t_\t_").unwrap();
        writeln!(document, "3\t{noun}\t{noun}\tNOUN\tNN\t_\t5\tnsubj\t_\t_").unwrap();
        writeln!(document, "4\tis\tbe\tAUX\tVBZ\t_\t5\tcop\t_\t_").unwrap();
        writeln!(document, "5\t{other}\t{other}\tNOUN\tNN\t_\t0\troot\t_\t_").unwrap();
        document.push('\n');
    }
    document
}
