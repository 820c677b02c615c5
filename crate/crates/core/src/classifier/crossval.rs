//! Stratified cross-validation and hyperparameter grid search.
//!
//! Keyword selection happens inside every fold, on that fold's training
//! side only: selecting once on the full corpus would leak held-out
//! documents into the feature space and flatter the scores. Grid cells are
//! independent, run in parallel, and merge in grid order, so parallelism
//! never shows in the output.

use rand::RngCore;
use rand::SeedableRng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{Language, Sentiment};
use crate::error::{Error, Result};
use crate::keywords::{EntropyTable, Quarters, select_keywords};
use crate::textproc::{TermClassCounts, Token};

use super::svm::TrainStats;
use super::{FeatureVector, SvcModel, f1_score, predict, train_svc, vectorize};

/// The default regularization grid: 0.25 to 4.00 in steps of 0.25.
pub fn default_c_grid() -> Vec<Quarters> {
    (1..=16).map(Quarters::from_quarter_count).collect()
}

/// Scores of one cross-validation run. `std_f1` is the population standard
/// deviation over folds.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub mean_f1: f64,
    pub std_f1: f64,
    pub per_fold_f1: Vec<f64>,
    pub k: usize,
}

/// Assigns each document index to one of `k` folds, shuffling every class
/// separately with a ChaCha stream seeded by `seed` and dealing the
/// shuffled indices round-robin. Each class therefore spreads as evenly
/// over the folds as arithmetic allows. A class with fewer than two members
/// cannot stratify and is an error.
pub fn stratified_folds(labels: &[Sentiment], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::TooFewFolds { k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    for (class, name) in [(Sentiment::Positive, "positive"), (Sentiment::Negative, "negative")] {
        let mut indices: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if indices.len() < 2 {
            return Err(Error::Stratification {
                label: name,
                count: indices.len(),
                k,
            });
        }
        indices.shuffle(&mut rng);
        for (position, index) in indices.into_iter().enumerate() {
            folds[position % k].push(index);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Mean and population standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, variance.sqrt())
}

/// Stratified k-fold cross-validation of the full keyword-selection +
/// SVM pipeline at one (alpha, alpha', C) point. Deterministic for a fixed
/// seed: fold assignment, per-fold training seeds, and training itself all
/// derive from `seed`.
pub fn cross_validate(
    documents: &[(Vec<Token>, Sentiment)],
    alpha: Quarters,
    alpha_prime: Quarters,
    c: f64,
    k: usize,
    seed: u64,
) -> Result<CvResult> {
    let labels: Vec<Sentiment> = documents.iter().map(|(_, l)| *l).collect();
    let folds = stratified_folds(&labels, k, seed)?;
    let mut seed_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f01d);
    let fold_seeds: Vec<u64> = (0..k).map(|_| seed_rng.next_u64()).collect();

    let mut per_fold_f1 = Vec::with_capacity(k);
    for (fold, test_indices) in folds.iter().enumerate() {
        let in_test = |i: &usize| test_indices.binary_search(i).is_ok();
        let train_docs = || {
            documents
                .iter()
                .enumerate()
                .filter(|(i, _)| !in_test(i))
                .map(|(_, (tokens, label))| (tokens.as_slice(), *label))
        };
        let counts = TermClassCounts::from_docs(train_docs());
        let table = EntropyTable::from_counts(&counts);
        let set = select_keywords(&table, alpha, alpha_prime);

        let samples: Vec<FeatureVector> = train_docs().map(|(t, _)| vectorize(t, &set)).collect();
        let train_labels: Vec<Sentiment> = train_docs().map(|(_, l)| l).collect();
        let (model, _) = train_svc(
            &samples,
            &train_labels,
            set,
            Language::English, // placeholder; CV never reads the language
            c,
            fold_seeds[fold],
        )?;

        let mut predictions = Vec::with_capacity(test_indices.len());
        let mut golds = Vec::with_capacity(test_indices.len());
        for &i in test_indices {
            let (tokens, label) = &documents[i];
            predictions.push(predict(&model, &vectorize(tokens, model.keyword_set()))?);
            golds.push(*label);
        }
        per_fold_f1.push(f1_score(&predictions, &golds)?);
    }

    let (mean_f1, std_f1) = mean_std(&per_fold_f1);
    Ok(CvResult {
        mean_f1,
        std_f1,
        per_fold_f1,
        k,
    })
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub alpha: Quarters,
    pub alpha_prime: Quarters,
    pub c: Quarters,
    /// Keywords selected on the full corpus at this (alpha, alpha') pair;
    /// the tie-break prefers smaller sets.
    pub keyword_count: usize,
    pub result: CvResult,
}

/// Grid search outcome: the winning cell plus the full table in grid order
/// (alpha outermost, then alpha', then C).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best: GridCell,
    pub cells: Vec<GridCell>,
}

/// True when `a` beats `b`: higher mean F1, then fewer keywords, then
/// smaller C, then smaller alpha, then smaller alpha'.
fn beats(a: &GridCell, b: &GridCell) -> bool {
    if a.result.mean_f1 != b.result.mean_f1 {
        return a.result.mean_f1 > b.result.mean_f1;
    }
    if a.keyword_count != b.keyword_count {
        return a.keyword_count < b.keyword_count;
    }
    if a.c != b.c {
        return a.c < b.c;
    }
    if a.alpha != b.alpha {
        return a.alpha < b.alpha;
    }
    a.alpha_prime < b.alpha_prime
}

/// Cross-validates every (alpha, alpha', C) combination and picks the best
/// cell. Cells run in parallel; results and errors are reported in grid
/// order, so the outcome is independent of scheduling.
pub fn grid_search(
    documents: &[(Vec<Token>, Sentiment)],
    alphas: &[Quarters],
    alpha_primes: &[Quarters],
    cs: &[Quarters],
    k: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    if alphas.is_empty() {
        return Err(Error::EmptyGrid { grid: "alpha" });
    }
    if alpha_primes.is_empty() {
        return Err(Error::EmptyGrid { grid: "alpha_prime" });
    }
    if cs.is_empty() {
        return Err(Error::EmptyGrid { grid: "C" });
    }

    // Keyword counts for the tie-break come from the full corpus, once per
    // (alpha, alpha') pair.
    let full_table = EntropyTable::from_counts(&TermClassCounts::from_labeled(documents));
    let mut points = Vec::with_capacity(alphas.len() * alpha_primes.len() * cs.len());
    for &alpha in alphas {
        for &alpha_prime in alpha_primes {
            let keyword_count =
                select_keywords(&full_table, alpha, alpha_prime).total_keywords();
            for &c in cs {
                points.push((alpha, alpha_prime, c, keyword_count));
            }
        }
    }

    let outcomes: Vec<Result<GridCell>> = points
        .par_iter()
        .map(|&(alpha, alpha_prime, c, keyword_count)| {
            let result = cross_validate(documents, alpha, alpha_prime, c.as_f64(), k, seed)?;
            Ok(GridCell {
                alpha,
                alpha_prime,
                c,
                keyword_count,
                result,
            })
        })
        .collect();

    let mut cells = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        cells.push(outcome?);
    }
    let mut best = cells[0].clone();
    for cell in &cells[1..] {
        if beats(cell, &best) {
            best = cell.clone();
        }
    }
    Ok(GridSearchResult { best, cells })
}

/// Trains the final model on the whole labeled corpus at a fixed parameter
/// point, selecting keywords from all documents.
pub fn train_on_all(
    documents: &[(Vec<Token>, Sentiment)],
    alpha: Quarters,
    alpha_prime: Quarters,
    c: f64,
    language: Language,
    seed: u64,
) -> Result<(SvcModel, TrainStats)> {
    let counts = TermClassCounts::from_labeled(documents);
    let table = EntropyTable::from_counts(&counts);
    let set = select_keywords(&table, alpha, alpha_prime);
    let samples: Vec<FeatureVector> = documents
        .iter()
        .map(|(tokens, _)| vectorize(tokens, &set))
        .collect();
    let labels: Vec<Sentiment> = documents.iter().map(|(_, l)| *l).collect();
    train_svc(&samples, &labels, set, language, c, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Language;
    use crate::textproc::Tokenizer;

    fn q(quarters: u32) -> Quarters {
        Quarters::from_quarter_count(quarters)
    }

    fn labeled(corpus: &[(&str, Sentiment)]) -> Vec<(Vec<Token>, Sentiment)> {
        let tok = Tokenizer::new();
        corpus
            .iter()
            .map(|(text, label)| (tok.tokenize(text, Language::English), *label))
            .collect()
    }

    fn separable_corpus() -> Vec<(Vec<Token>, Sentiment)> {
        labeled(&[
            ("good breakfast view", Sentiment::Positive),
            ("good location", Sentiment::Positive),
            ("good staff good", Sentiment::Positive),
            ("good value here", Sentiment::Positive),
            ("bad smell", Sentiment::Negative),
            ("bad noise outside", Sentiment::Negative),
            ("bad carpet bad", Sentiment::Negative),
            ("bad lift", Sentiment::Negative),
        ])
    }

    #[test]
    fn folds_partition_all_indices_evenly_per_class() {
        let labels: Vec<Sentiment> = (0..23)
            .map(|i| {
                if i % 3 == 0 {
                    Sentiment::Negative
                } else {
                    Sentiment::Positive
                }
            })
            .collect();
        let folds = stratified_folds(&labels, 4, 9).unwrap();
        let mut seen: Vec<usize> = folds.iter().flatten().copied().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..23).collect::<Vec<_>>());
        for class in [Sentiment::Positive, Sentiment::Negative] {
            let sizes: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|&&i| labels[i] == class).count())
                .collect();
            let (min, max) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            assert!(max - min <= 1, "class {class:?} spread {sizes:?}");
        }
    }

    #[test]
    fn fold_assignment_depends_on_the_seed() {
        let labels: Vec<Sentiment> = (0..30)
            .map(|i| {
                if i < 15 {
                    Sentiment::Positive
                } else {
                    Sentiment::Negative
                }
            })
            .collect();
        let a = stratified_folds(&labels, 5, 1).unwrap();
        let b = stratified_folds(&labels, 5, 2).unwrap();
        assert_ne!(a, b, "different seeds should shuffle differently");
        let a_again = stratified_folds(&labels, 5, 1).unwrap();
        assert_eq!(a, a_again);
    }

    #[test]
    fn too_small_classes_cannot_stratify() {
        let labels = vec![
            Sentiment::Positive,
            Sentiment::Positive,
            Sentiment::Positive,
            Sentiment::Negative,
        ];
        match stratified_folds(&labels, 2, 0) {
            Err(Error::Stratification { label, count, .. }) => {
                assert_eq!(label, "negative");
                assert_eq!(count, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn one_fold_is_not_cross_validation() {
        let labels = vec![Sentiment::Positive, Sentiment::Negative];
        assert!(matches!(
            stratified_folds(&labels, 1, 0),
            Err(Error::TooFewFolds { k: 1 })
        ));
    }

    #[test]
    fn a_cleanly_separable_corpus_scores_a_perfect_mean() {
        let docs = separable_corpus();
        let result = cross_validate(&docs, q(6), q(6), 1.0, 2, 42).unwrap();
        assert_eq!(result.mean_f1, 1.0);
        assert_eq!(result.std_f1, 0.0);
        assert_eq!(result.per_fold_f1, vec![1.0, 1.0]);
    }

    #[test]
    fn cross_validation_is_bitwise_deterministic() {
        let docs = separable_corpus();
        let a = cross_validate(&docs, q(6), q(8), 0.5, 4, 7).unwrap();
        let b = cross_validate(&docs, q(6), q(8), 0.5, 4, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_search_rejects_empty_grids() {
        let docs = separable_corpus();
        let err = grid_search(&docs, &[], &[q(6)], &[q(4)], 2, 0).unwrap_err();
        assert!(matches!(err, Error::EmptyGrid { grid: "alpha" }));
        let err = grid_search(&docs, &[q(6)], &[q(6)], &[], 2, 0).unwrap_err();
        assert!(matches!(err, Error::EmptyGrid { grid: "C" }));
    }

    #[test]
    fn grid_cells_come_back_in_grid_order() {
        let docs = separable_corpus();
        let result = grid_search(&docs, &[q(5), q(6)], &[q(7)], &[q(2), q(4)], 2, 3).unwrap();
        let order: Vec<(u32, u32, u32)> = result
            .cells
            .iter()
            .map(|c| {
                (
                    c.alpha.quarter_count(),
                    c.alpha_prime.quarter_count(),
                    c.c.quarter_count(),
                )
            })
            .collect();
        assert_eq!(order, [(5, 7, 2), (5, 7, 4), (6, 7, 2), (6, 7, 4)]);
    }

    /// "ok" occurs in three positive documents (entropy log2 3 ~ 1.585) and
    /// two negative ones (entropy 1), so alpha = 1.5 keeps it and
    /// alpha = 1.75 drops it, while "good"/"bad" separate the corpus
    /// perfectly either way. The tie on mean F1 must fall to the smaller
    /// keyword set, then to the smaller C.
    #[test]
    fn ties_fall_to_fewer_keywords_then_smaller_c() {
        let docs = labeled(&[
            ("good ok stay", Sentiment::Positive),
            ("good ok room", Sentiment::Positive),
            ("good ok visit", Sentiment::Positive),
            ("good trip", Sentiment::Positive),
            ("bad ok noise", Sentiment::Negative),
            ("bad ok mold", Sentiment::Negative),
            ("bad smell", Sentiment::Negative),
            ("bad stain", Sentiment::Negative),
        ]);
        let alphas = [q(6), q(7)]; // 1.5, 1.75
        let result = grid_search(&docs, &alphas, &[q(8)], &[q(4), q(8)], 2, 5).unwrap();
        for cell in &result.cells {
            assert_eq!(cell.result.mean_f1, 1.0, "cell {cell:?} broke the tie setup");
        }
        let counts: Vec<usize> = result.cells.iter().map(|c| c.keyword_count).collect();
        assert!(counts[0] > counts[2], "alpha=1.5 should select more keywords");
        assert_eq!(result.best.alpha, q(7));
        assert_eq!(result.best.c, q(4));
    }

    #[test]
    fn train_on_all_produces_a_model_over_the_full_keyword_set() {
        let docs = separable_corpus();
        let (model, stats) =
            train_on_all(&docs, q(6), q(6), 1.0, Language::English, 11).unwrap();
        assert!(stats.converged);
        assert!(model.keyword_set().positive().iter().any(|t| t == "good"));
        assert!(model.keyword_set().negative().iter().any(|t| t == "bad"));
        for (tokens, label) in &docs {
            let x = vectorize(tokens, model.keyword_set());
            assert_eq!(predict(&model, &x).unwrap(), *label);
        }
    }
}
