//! Synthetic classification data: seeded Gaussian mixtures with optional
//! antipodal mode pairs per class.
//!
//! With two modes per class the two blobs sit at +mu and -mu, so class label
//! is not linearly decodable from the inputs; a trained network has to build
//! the feature, which is what makes probe accuracy depend on layer depth.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::repcore::Matrix;

use super::SynthConfig;

/// A labeled train/eval split. Inputs are `input_dim x n` with one example
/// per column.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub train_inputs: Matrix,
    pub train_labels: Vec<usize>,
    pub eval_inputs: Matrix,
    pub eval_labels: Vec<usize>,
}

/// Generate the mixture dataset. Class priors are uniform by exact count
/// (label of example `i` is `i mod n_classes`); train and eval draws are
/// disjoint streams of the same seeded generator.
pub fn generate_dataset(config: &SynthConfig, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = config.input_dim;

    // One unit direction per class, scaled to the configured separation.
    let centers: Vec<DVector<f64>> = (0..config.n_classes)
        .map(|_| {
            let mut v = DVector::from_fn(d, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
            let norm = v.norm();
            if norm > 0.0 {
                v /= norm;
            }
            v * config.data.mean_scale
        })
        .collect();

    let sample_split = |count: usize, rng: &mut ChaCha8Rng| -> (Matrix, Vec<usize>) {
        let mut inputs = Matrix::zeros(d, count);
        let mut labels = Vec::with_capacity(count);
        for i in 0..count {
            let label = i % config.n_classes;
            let flip = if config.data.modes_per_class == 2 && (i / config.n_classes) % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            for r in 0..d {
                let noise: f64 = StandardNormal.sample(rng);
                inputs[(r, i)] = flip * centers[label][r] + config.data.noise_scale * noise;
            }
            labels.push(label);
        }
        (inputs, labels)
    };

    let (train_inputs, train_labels) = sample_split(config.n_train, &mut rng);
    let (eval_inputs, eval_labels) = sample_split(config.n_eval, &mut rng);
    Dataset {
        train_inputs,
        train_labels,
        eval_inputs,
        eval_labels,
    }
}
