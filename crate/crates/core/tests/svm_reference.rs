//! Cross-checks the dual coordinate-descent trainer against the
//! projected-subgradient reference minimizer on the same primal objective.
//!
//! Both optimizers attack 0.5(‖w‖² + b²) + C·Σ max(0, 1 − yᵢ(w·xᵢ + b))
//! from unrelated directions — dual coordinate updates with per-epoch
//! shuffles versus deterministic best-iterate subgradient steps — so
//! agreement of the achieved objective pins the trainer to the objective
//! it claims to minimize.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use review_miner_core::classifier::reference::subgradient_reference;
use review_miner_core::classifier::{
    FeatureVector, predict, primal_objective, train_svc, vectorize,
};
use review_miner_core::corpus::{Language, Sentiment};
use review_miner_core::keywords::{KeywordSet, Quarters};

/// Reference-run settings: deterministic, generous enough that the best
/// iterate sits well inside the 1e-3 comparison band on these tiny
/// problems.
const CHUNK: usize = 2_000;
const MAX_ITERATIONS: usize = 1_500_000;
const IMPROVEMENT_TOLERANCE: f64 = 1e-10;

fn q(quarters: u32) -> Quarters {
    Quarters::from_quarter_count(quarters)
}

/// A two-feature keyword set so the public training path can be used for
/// raw optimization problems.
fn two_feature_set() -> KeywordSet {
    KeywordSet::new(q(5), q(5), vec!["f0".into()], vec!["f1".into()])
}

fn fv(a: u32, b: u32) -> FeatureVector {
    FeatureVector::new(2, vec![(0, a), (1, b)])
}

/// Four points, one of them (0,1)→Positive planted on the wrong side, so
/// the optimum must pay hinge loss. This problem solves by hand: the KKT
/// system with the violator's multiplier at its bound gives
/// w = (4/9, -7/9), b = 5/9 and objective exactly 16/9. The frozen value
/// is the deterministic reference's result at the settings above, which
/// sits 5.6e-10 over that optimum; the trainer must land within 1e-3.
#[test]
fn four_point_problem_matches_the_reference_minimizer() {
    const FROZEN_REFERENCE_OBJECTIVE: f64 = 1.777777778333333;

    let samples = vec![fv(2, 0), fv(1, 0), fv(0, 2), fv(0, 1)];
    let labels = vec![
        Sentiment::Positive,
        Sentiment::Positive,
        Sentiment::Negative,
        Sentiment::Positive,
    ];
    let reference = subgradient_reference(
        &samples,
        &labels,
        1.0,
        CHUNK,
        MAX_ITERATIONS,
        IMPROVEMENT_TOLERANCE,
    );
    assert!(
        (reference.objective - FROZEN_REFERENCE_OBJECTIVE).abs() <= 1e-9,
        "reference drifted: {:.15}",
        reference.objective
    );
    assert!(
        (FROZEN_REFERENCE_OBJECTIVE - 16.0 / 9.0).abs() <= 1e-8,
        "frozen value detached from the analytic optimum"
    );

    let (model, stats) = train_svc(&samples, &labels, two_feature_set(), Language::English, 1.0, 7)
        .unwrap();
    assert!(stats.converged);
    let trained = primal_objective(model.weights(), model.bias(), &samples, &labels, 1.0);
    assert!(
        (trained - reference.objective).abs() <= 1e-3,
        "trained {trained:.9} vs reference {:.9}",
        reference.objective
    );
}

#[test]
fn random_small_problems_agree_with_the_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f3_0bac1e);
    let set = two_feature_set();
    for round in 0..12 {
        let (samples, labels) = loop {
            let n = rng.random_range(2..=6);
            let samples: Vec<FeatureVector> = (0..n)
                .map(|_| fv(rng.random_range(0..=3), rng.random_range(0..=3)))
                .collect();
            let labels: Vec<Sentiment> = (0..n)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        Sentiment::Positive
                    } else {
                        Sentiment::Negative
                    }
                })
                .collect();
            if labels.contains(&Sentiment::Positive) && labels.contains(&Sentiment::Negative) {
                break (samples, labels);
            }
        };
        for c in [0.5, 1.0, 2.0] {
            let reference = subgradient_reference(
                &samples,
                &labels,
                c,
                CHUNK,
                MAX_ITERATIONS,
                IMPROVEMENT_TOLERANCE,
            );
            let (model, _) =
                train_svc(&samples, &labels, set.clone(), Language::English, c, round).unwrap();
            let trained = primal_objective(model.weights(), model.bias(), &samples, &labels, c);
            assert!(
                (trained - reference.objective).abs() <= 1e-3,
                "round {round} C={c}: trained {trained:.9} vs reference {:.9}",
                reference.objective
            );
        }
    }
}

/// Duplicating every sample doubles the loss term, so it must train to the
/// same decisions as doubling C on the originals.
#[test]
fn duplicated_samples_behave_like_doubled_c() {
    let samples = vec![fv(3, 0), fv(2, 1), fv(0, 2), fv(1, 3), fv(0, 1)];
    let labels = vec![
        Sentiment::Positive,
        Sentiment::Positive,
        Sentiment::Negative,
        Sentiment::Negative,
        Sentiment::Positive,
    ];
    let mut doubled_samples = samples.clone();
    doubled_samples.extend(samples.iter().cloned());
    let mut doubled_labels = labels.clone();
    doubled_labels.extend(labels.iter().copied());

    let set = two_feature_set();
    let (doubled_c, _) =
        train_svc(&samples, &labels, set.clone(), Language::English, 2.0, 3).unwrap();
    let (duplicated, _) = train_svc(
        &doubled_samples,
        &doubled_labels,
        set,
        Language::English,
        1.0,
        3,
    )
    .unwrap();
    for sample in &samples {
        assert_eq!(
            predict(&doubled_c, sample).unwrap(),
            predict(&duplicated, sample).unwrap(),
        );
    }
}

#[test]
fn separable_data_with_huge_c_trains_to_zero_error() {
    let samples = vec![fv(2, 0), fv(3, 1), fv(1, 0), fv(0, 2), fv(1, 3), fv(0, 1)];
    let labels = vec![
        Sentiment::Positive,
        Sentiment::Positive,
        Sentiment::Positive,
        Sentiment::Negative,
        Sentiment::Negative,
        Sentiment::Negative,
    ];
    let (model, _) =
        train_svc(&samples, &labels, two_feature_set(), Language::English, 1e4, 11).unwrap();
    for (sample, label) in samples.iter().zip(&labels) {
        assert_eq!(predict(&model, sample).unwrap(), *label);
    }
}

/// The end-to-end feature path: tokenized sentences vectorized over a real
/// keyword set train to the same objective the reference reaches on the
/// same vectors.
#[test]
fn tokenized_pipeline_matches_the_reference_too() {
    use review_miner_core::textproc::Tokenizer;
    let tokenizer = Tokenizer::new();
    let set = KeywordSet::new(
        q(6),
        q(6),
        vec!["good".into(), "clean".into()],
        vec!["bad".into()],
    );
    let texts = [
        ("good clean room", Sentiment::Positive),
        ("good view", Sentiment::Positive),
        ("bad clean floor", Sentiment::Negative),
        ("bad bad smell", Sentiment::Negative),
    ];
    let samples: Vec<FeatureVector> = texts
        .iter()
        .map(|(t, _)| vectorize(&tokenizer.tokenize(t, Language::English), &set))
        .collect();
    let labels: Vec<Sentiment> = texts.iter().map(|(_, l)| *l).collect();
    let reference = subgradient_reference(
        &samples,
        &labels,
        1.0,
        CHUNK,
        MAX_ITERATIONS,
        IMPROVEMENT_TOLERANCE,
    );
    let (model, _) = train_svc(&samples, &labels, set, Language::English, 1.0, 5).unwrap();
    let trained = primal_objective(model.weights(), model.bias(), &samples, &labels, 1.0);
    assert!((trained - reference.objective).abs() <= 1e-3);
}
