//! Dual coordinate descent for the linear L1 soft-margin SVM.
//!
//! The bias is realized as an augmented constant feature of value 1, so the
//! primal is (1/2)(|w|^2 + b^2) + C * sum_i max(0, 1 - y_i (w.x_i + b)) and
//! the dual has pure box constraints 0 <= alpha_i <= C with no equality
//! constraint. One pass visits every sample in a seeded random order and
//! moves its alpha to the exact per-coordinate minimum, which makes the dual
//! objective non-decreasing across epochs. Training stops when the largest
//! projected-gradient violation in an epoch falls below
//! [`CONVERGENCE_TOLERANCE`] or after [`MAX_EPOCHS`] epochs.
//!
//! Given the same samples in the same order, the same C, and the same seed,
//! training is bitwise deterministic.

use rand::SeedableRng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Sentiment;
use crate::error::{Error, Result};

use super::FeatureVector;

/// Largest projected-gradient violation tolerated in a converged epoch.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

/// Epoch cap for non-separable or slowly converging problems.
pub const MAX_EPOCHS: usize = 10_000;

/// Alpha updates smaller than this are treated as no-ops.
const UPDATE_EPSILON: f64 = 1e-12;

/// Optimization trace of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainStats {
    /// Dual objective after each completed epoch. Exact per-coordinate
    /// minimization makes this non-decreasing.
    pub dual_objective_per_epoch: Vec<f64>,
    pub epochs: usize,
    pub converged: bool,
    /// Largest projected-gradient violation seen in the final epoch.
    pub final_violation: f64,
}

pub(super) struct LinearFit {
    /// Keyword weights followed by nothing; the augmented bias weight is
    /// split off into `bias`.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub stats: TrainStats,
}

fn to_pm1(label: Sentiment) -> f64 {
    match label {
        Sentiment::Positive => 1.0,
        Sentiment::Negative => -1.0,
    }
}

/// Decision value w.x + b for a sparse count vector.
pub(super) fn decision(weights: &[f64], bias: f64, x: &FeatureVector) -> f64 {
    let mut value = bias;
    for &(ordinal, count) in x.entries() {
        value += weights[ordinal] * count as f64;
    }
    value
}

/// Primal objective of the augmented formulation. Public to let reference
/// optimizers and tests score any (weights, bias) pair identically.
pub fn primal_objective(
    weights: &[f64],
    bias: f64,
    samples: &[FeatureVector],
    labels: &[Sentiment],
    c: f64,
) -> f64 {
    let norm_sq: f64 = weights.iter().map(|w| w * w).sum::<f64>() + bias * bias;
    let hinge: f64 = samples
        .iter()
        .zip(labels)
        .map(|(x, &y)| (1.0 - to_pm1(y) * decision(weights, bias, x)).max(0.0))
        .sum();
    0.5 * norm_sq + c * hinge
}

pub(super) fn train(
    samples: &[FeatureVector],
    labels: &[Sentiment],
    c: f64,
    seed: u64,
) -> Result<LinearFit> {
    if samples.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    assert_eq!(samples.len(), labels.len(), "one label per sample");
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidParameter { what: "C", value: c });
    }
    let dim = samples[0].dim();
    for x in samples {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                vector: x.dim(),
                model: dim,
            });
        }
    }
    if labels.iter().all(|&y| y == Sentiment::Positive) {
        return Err(Error::SingleClass { label: "positive" });
    }
    if labels.iter().all(|&y| y == Sentiment::Negative) {
        return Err(Error::SingleClass { label: "negative" });
    }

    let n = samples.len();
    let y: Vec<f64> = labels.iter().map(|&l| to_pm1(l)).collect();
    // Squared norms of the augmented vectors; the +1 is the bias feature,
    // so q is always at least 1 and the update below never divides by zero.
    let q: Vec<f64> = samples.iter().map(|x| x.norm_sq() + 1.0).collect();

    // weights[dim] is the augmented bias coordinate.
    let mut w = vec![0.0f64; dim + 1];
    let mut alpha = vec![0.0f64; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut stats = TrainStats {
        dual_objective_per_epoch: Vec::new(),
        epochs: 0,
        converged: false,
        final_violation: f64::INFINITY,
    };

    for _ in 0..MAX_EPOCHS {
        order.shuffle(&mut rng);
        let mut max_violation = 0.0f64;
        for &i in &order {
            let x = &samples[i];
            let g = y[i] * (decision(&w[..dim], w[dim], x)) - 1.0;
            let a = alpha[i];
            let pg = if a <= 0.0 {
                g.min(0.0)
            } else if a >= c {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());
            if pg.abs() <= UPDATE_EPSILON {
                continue;
            }
            let a_new = (a - g / q[i]).clamp(0.0, c);
            let delta = a_new - a;
            if delta == 0.0 {
                continue;
            }
            alpha[i] = a_new;
            let step = delta * y[i];
            for &(ordinal, count) in x.entries() {
                w[ordinal] += step * count as f64;
            }
            w[dim] += step;
        }
        stats.epochs += 1;
        let norm_sq: f64 = w.iter().map(|v| v * v).sum();
        let dual = alpha.iter().sum::<f64>() - 0.5 * norm_sq;
        stats.dual_objective_per_epoch.push(dual);
        stats.final_violation = max_violation;
        if max_violation < CONVERGENCE_TOLERANCE {
            stats.converged = true;
            break;
        }
    }

    let bias = w[dim];
    w.truncate(dim);
    Ok(LinearFit {
        weights: w,
        bias,
        stats,
    })
}
