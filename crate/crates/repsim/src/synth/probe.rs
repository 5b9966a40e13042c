//! Linear probes: L2-penalized multinomial logistic regression trained with
//! full-batch gradient descent, so the result depends only on the seed (for
//! the split), never on iteration order.

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::repcore::{Matrix, RawRepresentation};

use super::ProbeConfig;

/// Gradient-norm target; iteration stops early once the mean-per-sample
/// gradient drops below it.
const GRAD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProbeResult {
    pub layer_id: u32,
    pub accuracy: f64,
    pub task: String,
}

/// Probe a representation: deterministic split into probe-train and
/// probe-eval halves, fit on the first, report accuracy on the second.
pub fn linear_probe(
    rep: &RawRepresentation,
    labels: &[usize],
    task: &str,
    config: &ProbeConfig,
    seed: u64,
) -> Result<ProbeResult> {
    let n = rep.examples();
    if labels.len() != n {
        return Err(Error::ShapeMismatch {
            left: format!("{n} representation columns"),
            right: format!("{} labels", labels.len()),
            context: "linear_probe".into(),
        });
    }
    if n < 4 {
        return Err(Error::TooFewSamples { n, min: 4 });
    }
    let n_classes = labels.iter().max().map(|&m| m + 1).unwrap_or(1).max(2);

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let split = n / 2;
    let (train_idx, eval_idx) = order.split_at(split);

    let p = rep.neurons();
    // Standardize features on the probe-train half for conditioning; the
    // same affine map is applied to the eval half.
    let mut mean: DVector<f64> = DVector::zeros(p);
    for &i in train_idx {
        mean += rep.data.column(i);
    }
    mean /= train_idx.len() as f64;
    let mut scale: DVector<f64> = DVector::zeros(p);
    for &i in train_idx {
        let d = rep.data.column(i) - &mean;
        for r in 0..p {
            scale[r] += d[r] * d[r];
        }
    }
    for r in 0..p {
        scale[r] = (scale[r] / train_idx.len() as f64).sqrt();
        if scale[r] < 1e-12 {
            scale[r] = 1.0;
        }
    }

    // Feature matrix with a trailing bias row.
    let featurize = |indices: &[usize]| -> Matrix {
        Matrix::from_fn(p + 1, indices.len(), |r, c| {
            if r == p {
                1.0
            } else {
                (rep.data[(r, indices[c])] - mean[r]) / scale[r]
            }
        })
    };
    let x_train = featurize(train_idx);
    let x_eval = featurize(eval_idx);
    let y_train: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
    let y_eval: Vec<usize> = eval_idx.iter().map(|&i| labels[i]).collect();

    let weights = fit_logistic(&x_train, &y_train, n_classes, config)?;

    let logits = &weights * &x_eval;
    let correct = y_eval
        .iter()
        .enumerate()
        .filter(|(c, &label)| super::mlp::argmax_column(&logits, *c) == label)
        .count();
    Ok(ProbeResult {
        layer_id: rep.layer_id,
        accuracy: correct as f64 / y_eval.len() as f64,
        task: task.to_string(),
    })
}

/// Full-batch gradient descent on the penalized softmax objective with a
/// Lipschitz step size.
fn fit_logistic(
    x: &Matrix,
    labels: &[usize],
    n_classes: usize,
    config: &ProbeConfig,
) -> Result<Matrix> {
    let m = labels.len() as f64;
    let lipschitz = spectral_norm_squared(x) / (4.0 * m) + config.l2_penalty;
    let step = 1.0 / lipschitz.max(1e-12);
    let bias_row = x.nrows() - 1;

    let mut weights = Matrix::zeros(n_classes, x.nrows());
    for iteration in 0..config.iterations.max(1) {
        let mut probs = &weights * x;
        for mut col in probs.column_iter_mut() {
            let max = col.max();
            let mut sum = 0.0;
            for v in col.iter_mut() {
                *v = (*v - max).exp();
                sum += *v;
            }
            col /= sum;
        }
        for (c, label) in labels.iter().enumerate() {
            probs[(*label, c)] -= 1.0;
        }
        let mut grad = probs * x.transpose() / m;
        // Penalize everything except the bias column.
        for r in 0..n_classes {
            for c in 0..bias_row {
                grad[(r, c)] += config.l2_penalty * weights[(r, c)];
            }
        }
        if !grad.iter().all(|g| g.is_finite()) {
            return Err(Error::DivergenceDetected {
                context: format!("probe gradient became non-finite at iteration {iteration}"),
            });
        }
        let grad_norm = grad.norm();
        weights -= grad * step;
        if grad_norm <= GRAD_TOL {
            break;
        }
    }
    Ok(weights)
}

/// Largest squared singular value via power iteration on `x x^T`
/// (deterministic all-ones start).
fn spectral_norm_squared(x: &Matrix) -> f64 {
    let gram = x * x.transpose();
    let mut v = DVector::from_element(gram.nrows(), 1.0);
    let mut value = 0.0;
    for _ in 0..50 {
        let next = &gram * &v;
        let norm = next.norm();
        if norm < 1e-300 {
            return 0.0;
        }
        value = norm;
        v = next / norm;
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::SynthConfig;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn probe_config() -> ProbeConfig {
        SynthConfig::default().probe
    }

    #[test]
    fn linearly_decodable_labels_probe_near_perfectly() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rep_data = Matrix::from_fn(6, 400, |_, _| StandardNormal.sample(&mut rng));
        let readout = Matrix::from_fn(3, 6, |_, _| StandardNormal.sample(&mut rng));
        let scores = &readout * &rep_data;
        let labels: Vec<usize> = (0..400)
            .map(|c| super::super::mlp::argmax_column(&scores, c))
            .collect();
        let rep = RawRepresentation::new(rep_data, "m", 2).unwrap();
        let result = linear_probe(&rep, &labels, "readout", &probe_config(), 1).unwrap();
        assert_eq!(result.layer_id, 2);
        assert!(result.accuracy >= 0.95, "accuracy {}", result.accuracy);
    }

    #[test]
    fn shuffled_labels_probe_near_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let rep_data = Matrix::from_fn(6, 600, |_, _| StandardNormal.sample(&mut rng));
        let labels: Vec<usize> = (0..600).map(|_| rng.random_range(0..4)).collect();
        let rep = RawRepresentation::new(rep_data, "m", 0).unwrap();
        let result = linear_probe(&rep, &labels, "noise", &probe_config(), 2).unwrap();
        assert!(
            (result.accuracy - 0.25).abs() <= 0.08,
            "chance-level expected, got {}",
            result.accuracy
        );
    }

    #[test]
    fn constant_representation_probes_at_majority_rate() {
        let rep_data = Matrix::from_element(4, 300, 1.0);
        // 2/3 of labels are class 0.
        let labels: Vec<usize> = (0..300).map(|i| usize::from(i % 3 == 0)).collect();
        let rep = RawRepresentation::new(rep_data, "m", 0).unwrap();
        let result = linear_probe(&rep, &labels, "constant", &probe_config(), 3).unwrap();
        let majority = labels.iter().filter(|&&l| l == 0).count() as f64 / 300.0;
        assert!(
            (result.accuracy - majority).abs() <= 0.08,
            "expected ~{majority}, got {}",
            result.accuracy
        );
    }

    #[test]
    fn probes_are_deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rep_data = Matrix::from_fn(5, 200, |_, _| StandardNormal.sample(&mut rng));
        let labels: Vec<usize> = (0..200).map(|i| i % 3).collect();
        let rep = RawRepresentation::new(rep_data, "m", 0).unwrap();
        let a = linear_probe(&rep, &labels, "t", &probe_config(), 7).unwrap();
        let b = linear_probe(&rep, &labels, "t", &probe_config(), 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn label_length_mismatch_is_rejected() {
        let rep = RawRepresentation::new(Matrix::zeros(3, 10), "m", 0).unwrap();
        assert!(matches!(
            linear_probe(&rep, &[0, 1], "t", &probe_config(), 0),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
