//! Small multilayer perceptrons trained with seeded mini-batch SGD, and
//! per-layer representation extraction.

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::repcore::{Matrix, RawRepresentation};

use super::data::Dataset;
use super::{Activation, SynthConfig};

/// A trained network: hidden layers followed by a linear classification
/// head.
#[derive(Debug, Clone)]
pub struct Mlp {
    pub model_id: String,
    activation: Activation,
    /// `(weights, bias)` per layer; the last entry is the output head.
    layers: Vec<(Matrix, DVector<f64>)>,
}

/// Training output: the model plus its final accuracy on the training set.
#[derive(Debug, Clone)]
pub struct TrainedMlp {
    pub mlp: Mlp,
    pub train_accuracy: f64,
}

/// Train with seeded init and seeded shuffling; deterministic per
/// `(config, seed)`.
pub fn train_mlp(config: &SynthConfig, dataset: &Dataset, seed: u64) -> Result<TrainedMlp> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dims = vec![config.input_dim];
    dims.extend_from_slice(&config.hidden_widths);
    dims.push(config.n_classes);

    let mut layers = Vec::with_capacity(dims.len() - 1);
    for w in dims.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let scale = (2.0 / fan_in as f64).sqrt();
        let weights = Matrix::from_fn(fan_out, fan_in, |_, _| {
            let g: f64 = StandardNormal.sample(&mut rng);
            g * scale
        });
        layers.push((weights, DVector::zeros(fan_out)));
    }
    let mut mlp = Mlp {
        model_id: format!("mlp-s{seed}"),
        activation: config.activation,
        layers,
    };

    let n = dataset.train_labels.len();
    let mut order: Vec<usize> = (0..n).collect();
    let lr = config.sgd.learning_rate;
    for epoch in 0..config.sgd.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.sgd.batch_size) {
            let inputs = Matrix::from_fn(config.input_dim, batch.len(), |r, c| {
                dataset.train_inputs[(r, batch[c])]
            });
            let labels: Vec<usize> = batch.iter().map(|&i| dataset.train_labels[i]).collect();
            epoch_loss += sgd_step(&mut mlp, &inputs, &labels, lr);
        }
        if !epoch_loss.is_finite() {
            return Err(Error::DivergenceDetected {
                context: format!("loss became non-finite at epoch {epoch} (seed {seed})"),
            });
        }
    }

    let train_accuracy = accuracy(&mlp, &dataset.train_inputs, &dataset.train_labels);
    Ok(TrainedMlp {
        mlp,
        train_accuracy,
    })
}

/// Evaluation-set activations, one `width x n_eval` matrix per hidden layer,
/// layer ids assigned in depth order starting at 0.
pub fn extract_representations(mlp: &Mlp, dataset: &Dataset) -> Result<Vec<RawRepresentation>> {
    let expected = mlp.layers[0].0.ncols();
    if dataset.eval_inputs.nrows() != expected {
        return Err(Error::ShapeMismatch {
            left: format!("{} input rows", dataset.eval_inputs.nrows()),
            right: format!("{expected} model inputs"),
            context: "extract_representations".into(),
        });
    }
    let hidden = mlp.hidden_activations(&dataset.eval_inputs);
    hidden
        .into_iter()
        .enumerate()
        .map(|(idx, data)| RawRepresentation::new(data, mlp.model_id.clone(), idx as u32))
        .collect()
}

/// Saved forward state: every hidden activation, for the backward pass.
struct ForwardPass {
    /// `streams[0]` is the input; `streams[l + 1]` is hidden layer `l`.
    streams: Vec<Matrix>,
}

impl Mlp {
    fn forward(&self, inputs: &Matrix) -> ForwardPass {
        let hidden_count = self.layers.len() - 1;
        let mut streams = Vec::with_capacity(hidden_count + 1);
        streams.push(inputs.clone());
        for (weights, bias) in &self.layers[..hidden_count] {
            let mut z = weights * streams.last().unwrap();
            for mut col in z.column_iter_mut() {
                col += bias;
            }
            apply_activation(&mut z, self.activation);
            streams.push(z);
        }
        ForwardPass { streams }
    }

    /// Activations of every hidden layer on the given inputs.
    pub fn hidden_activations(&self, inputs: &Matrix) -> Vec<Matrix> {
        let mut pass = self.forward(inputs);
        pass.streams.remove(0);
        pass.streams
    }

    /// Class logits on the given inputs.
    pub fn logits(&self, inputs: &Matrix) -> Matrix {
        let pass = self.forward(inputs);
        let last = pass.streams.last().unwrap();
        let (weights, bias) = &self.layers[self.layers.len() - 1];
        let mut z = weights * last;
        for mut col in z.column_iter_mut() {
            col += bias;
        }
        z
    }
}

/// One mini-batch forward/backward/update. Returns the summed batch loss.
fn sgd_step(mlp: &mut Mlp, inputs: &Matrix, labels: &[usize], lr: f64) -> f64 {
    let batch = labels.len() as f64;
    let hidden_count = mlp.layers.len() - 1;
    let pass = mlp.forward(inputs);

    let (head_w, head_b) = &mlp.layers[hidden_count];
    let last_stream = pass.streams.last().unwrap();
    let mut logits = head_w * last_stream;
    for mut col in logits.column_iter_mut() {
        col += head_b;
    }

    // Softmax cross-entropy; delta = probs - one_hot(labels).
    let mut delta = logits;
    let mut loss = 0.0;
    for (c, mut col) in delta.column_iter_mut().enumerate() {
        let max = col.max();
        let mut sum = 0.0;
        for v in col.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        col /= sum;
        loss -= col[labels[c]].max(1e-300).ln();
        col[labels[c]] -= 1.0;
    }

    let head_grad_w = &delta * last_stream.transpose() / batch;
    let head_grad_b = DVector::from_fn(delta.nrows(), |r, _| delta.row(r).sum() / batch);
    let mut stream_delta = head_w.transpose() * &delta;
    mlp.layers[hidden_count].0 -= head_grad_w * lr;
    mlp.layers[hidden_count].1 -= head_grad_b * lr;

    for l in (0..hidden_count).rev() {
        // Gate by the activation derivative at the stored activation.
        let mut gated = stream_delta.clone();
        match mlp.activation {
            Activation::Relu => {
                for (u, a) in gated.iter_mut().zip(pass.streams[l + 1].iter()) {
                    if *a <= 0.0 {
                        *u = 0.0;
                    }
                }
            }
            Activation::Tanh => {
                for (u, a) in gated.iter_mut().zip(pass.streams[l + 1].iter()) {
                    *u *= 1.0 - a * a;
                }
            }
        }
        let grad_w = &gated * pass.streams[l].transpose() / batch;
        let grad_b = DVector::from_fn(gated.nrows(), |r, _| gated.row(r).sum() / batch);
        stream_delta = mlp.layers[l].0.transpose() * &gated;
        mlp.layers[l].0 -= grad_w * lr;
        mlp.layers[l].1 -= grad_b * lr;
    }
    loss
}

fn apply_activation(z: &mut Matrix, activation: Activation) {
    match activation {
        Activation::Relu => {
            for v in z.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        Activation::Tanh => {
            for v in z.iter_mut() {
                *v = v.tanh();
            }
        }
    }
}

pub(crate) fn accuracy(mlp: &Mlp, inputs: &Matrix, labels: &[usize]) -> f64 {
    let logits = mlp.logits(inputs);
    let correct = labels
        .iter()
        .enumerate()
        .filter(|(c, &label)| argmax_column(&logits, *c) == label)
        .count();
    correct as f64 / labels.len() as f64
}

pub(crate) fn argmax_column(m: &Matrix, col: usize) -> usize {
    let mut best = 0usize;
    for r in 1..m.nrows() {
        if m[(r, col)] > m[(best, col)] {
            best = r;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::data::generate_dataset;
    use crate::synth::{DataConfig, SgdConfig};

    fn small_config() -> SynthConfig {
        SynthConfig {
            input_dim: 8,
            n_classes: 3,
            n_train: 600,
            n_eval: 300,
            hidden_widths: vec![16, 16],
            activation: Activation::Relu,
            sgd: SgdConfig {
                learning_rate: 0.1,
                epochs: 25,
                batch_size: 32,
            },
            data: DataConfig {
                modes_per_class: 1,
                mean_scale: 3.0,
                noise_scale: 1.0,
                data_seed: 9,
            },
            train_seeds: vec![1],
            ..SynthConfig::default()
        }
    }

    #[test]
    fn seeded_training_is_reproducible() {
        let config = small_config();
        let data = generate_dataset(&config, config.data.data_seed);
        let a = train_mlp(&config, &data, 4).unwrap();
        let b = train_mlp(&config, &data, 4).unwrap();
        for (la, lb) in a.mlp.layers.iter().zip(b.mlp.layers.iter()) {
            assert_eq!(la.0, lb.0);
            assert_eq!(la.1, lb.1);
        }
        let c = train_mlp(&config, &data, 5).unwrap();
        assert_ne!(a.mlp.layers[0].0, c.mlp.layers[0].0);
    }

    #[test]
    fn zero_epochs_returns_initialization_near_chance() {
        let mut config = small_config();
        config.sgd.epochs = 0;
        let data = generate_dataset(&config, config.data.data_seed);
        let trained = train_mlp(&config, &data, 1).unwrap();
        // 3 classes: chance is ~1/3; an untrained head should sit near it.
        assert!(
            (trained.train_accuracy - 1.0 / 3.0).abs() < 0.2,
            "untrained accuracy {}",
            trained.train_accuracy
        );
    }

    #[test]
    fn separable_data_is_learned() {
        let config = small_config();
        let data = generate_dataset(&config, config.data.data_seed);
        let trained = train_mlp(&config, &data, 2).unwrap();
        assert!(
            trained.train_accuracy >= 0.9,
            "train accuracy {}",
            trained.train_accuracy
        );
    }

    #[test]
    fn representations_match_an_independent_forward_pass() {
        let config = small_config();
        let data = generate_dataset(&config, config.data.data_seed);
        let trained = train_mlp(&config, &data, 3).unwrap();
        let reps = extract_representations(&trained.mlp, &data).unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(reps[0].data.shape(), (16, 300));
        assert_eq!(reps[0].layer_id, 0);
        assert_eq!(reps[1].layer_id, 1);

        // Second, straight-line forward implementation.
        let (w0, b0) = (&trained.mlp.layers[0].0, &trained.mlp.layers[0].1);
        let mut h = w0 * &data.eval_inputs;
        for mut col in h.column_iter_mut() {
            col += b0;
        }
        for v in h.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        assert!((&h - &reps[0].data).norm() <= 1e-12);

        // Identical input columns produce identical representation columns.
        let mut twin_inputs = data.eval_inputs.clone();
        let col0 = twin_inputs.column(0).into_owned();
        twin_inputs.set_column(1, &col0);
        let twin = Dataset {
            eval_inputs: twin_inputs,
            ..data.clone()
        };
        let twin_reps = extract_representations(&trained.mlp, &twin).unwrap();
        assert_eq!(
            twin_reps[1].data.column(0),
            twin_reps[1].data.column(1)
        );
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let config = small_config();
        let data = generate_dataset(&config, config.data.data_seed);
        let trained = train_mlp(&config, &data, 1).unwrap();
        let bad = Dataset {
            eval_inputs: Matrix::zeros(5, 10),
            ..data
        };
        assert!(matches!(
            extract_representations(&trained.mlp, &bad),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
