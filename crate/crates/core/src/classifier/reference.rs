//! Projected-subgradient reference minimizer for the augmented primal.
//!
//! This is a deliberately different algorithm from the production trainer:
//! it walks the primal objective directly with a 1/t step size and keeps the
//! best iterate, instead of optimizing the dual coordinate-wise. Tests use
//! it as an independent check that both routes land on the same objective
//! value. It is far too slow for real training and that is fine.

use crate::corpus::Sentiment;

use super::FeatureVector;
use super::svm::primal_objective;

/// Best iterate found by [`subgradient_reference`].
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
    pub iterations: usize,
}

fn to_pm1(label: Sentiment) -> f64 {
    match label {
        Sentiment::Positive => 1.0,
        Sentiment::Negative => -1.0,
    }
}

/// Minimizes 0.5(|v|^2) + C sum max(0, 1 - y v.x~) over the augmented
/// vector v = (w, b) by plain subgradient descent with step 1/t, keeping
/// the best objective seen. Runs in chunks of `chunk` iterations and stops
/// early once a whole chunk improves the best objective by less than
/// `improvement_tolerance`, up to `max_iterations` total. Deterministic:
/// there is no randomness anywhere in the walk.
pub fn subgradient_reference(
    samples: &[FeatureVector],
    labels: &[Sentiment],
    c: f64,
    chunk: usize,
    max_iterations: usize,
    improvement_tolerance: f64,
) -> ReferenceSolution {
    assert!(!samples.is_empty(), "reference needs at least one sample");
    assert!(chunk > 0, "chunk must be positive");
    let dim = samples[0].dim();
    // v holds the keyword weights with the bias as the last coordinate.
    let mut v = vec![0.0f64; dim + 1];
    let mut best = v.clone();
    let mut best_objective = primal_objective(&v[..dim], v[dim], samples, labels, c);
    let mut t = 0usize;

    while t < max_iterations {
        let chunk_start_best = best_objective;
        for _ in 0..chunk.min(max_iterations - t) {
            t += 1;
            // Subgradient: v + C * sum over margin violators of -y x~.
            let mut g = v.clone();
            for (x, &label) in samples.iter().zip(labels) {
                let y = to_pm1(label);
                let mut f = v[dim];
                for &(ordinal, count) in x.entries() {
                    f += v[ordinal] * count as f64;
                }
                if y * f < 1.0 {
                    for &(ordinal, count) in x.entries() {
                        g[ordinal] -= c * y * count as f64;
                    }
                    g[dim] -= c * y;
                }
            }
            let eta = 1.0 / t as f64;
            for (vi, gi) in v.iter_mut().zip(&g) {
                *vi -= eta * gi;
            }
            let objective = primal_objective(&v[..dim], v[dim], samples, labels, c);
            if objective < best_objective {
                best_objective = objective;
                best.copy_from_slice(&v);
            }
        }
        if chunk_start_best - best_objective < improvement_tolerance {
            break;
        }
    }

    let bias = best[dim];
    best.truncate(dim);
    ReferenceSolution {
        weights: best,
        bias,
        objective: best_objective,
        iterations: t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_deterministic() {
        let samples = vec![
            FeatureVector::new(2, vec![(0, 2)]),
            FeatureVector::new(2, vec![(1, 1)]),
        ];
        let labels = vec![Sentiment::Positive, Sentiment::Negative];
        let a = subgradient_reference(&samples, &labels, 1.0, 10_000, 100_000, 1e-9);
        let b = subgradient_reference(&samples, &labels, 1.0, 10_000, 100_000, 1e-9);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.weights, b.weights);
    }

    #[test]
    fn objective_never_exceeds_the_zero_vector_objective() {
        let samples = vec![
            FeatureVector::new(1, vec![(0, 1)]),
            FeatureVector::new(1, vec![]),
        ];
        let labels = vec![Sentiment::Positive, Sentiment::Negative];
        let sol = subgradient_reference(&samples, &labels, 2.0, 1_000, 50_000, 1e-9);
        // v = 0 scores C * n; the best iterate can only improve on it.
        assert!(sol.objective <= 2.0 * 2.0 + 1e-12);
    }
}
