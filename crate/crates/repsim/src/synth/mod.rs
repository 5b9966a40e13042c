//! Desk-scale model factory: seeded MLPs on synthetic mixtures, per-layer
//! representation extraction, linear probes for functionality scores, and
//! suite materialization in the on-disk formats.

pub mod data;
mod mlp;
mod probe;

pub use data::{generate_dataset, Dataset};
pub use mlp::{extract_representations, train_mlp, Mlp, TrainedMlp};
pub use probe::{linear_probe, ProbeResult};

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::npy::Orientation;
use crate::io::suite::{write_suite, SuiteFile, SuiteFileEntry};
use crate::io::write_matrix;
use crate::metrics::MetricId;
use crate::perturb::{delete_components, PcDeletionSpec};
use crate::repcore::{CenteringAxis, RawRepresentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub l2_penalty: f64,
    pub iterations: usize,
}

/// Mixture-generator knobs. Two modes per class places the blobs
/// antipodally, which makes the task nonlinear and probe accuracy
/// depth-dependent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataConfig {
    pub modes_per_class: usize,
    pub mean_scale: f64,
    pub noise_scale: f64,
    /// Seed for the dataset itself; train seeds only vary the models.
    pub data_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub input_dim: usize,
    pub n_classes: usize,
    pub n_train: usize,
    pub n_eval: usize,
    pub hidden_widths: Vec<usize>,
    #[serde(default)]
    pub activation: Activation,
    pub train_seeds: Vec<u64>,
    pub sgd: SgdConfig,
    pub probe: ProbeConfig,
    pub data: DataConfig,
    /// Deletion grid for the pc-deletion preset; `None` scales the standard
    /// grid to the probed layer's width.
    #[serde(default)]
    pub deletion_grid: Option<Vec<usize>>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            input_dim: 32,
            n_classes: 10,
            n_train: 6000,
            n_eval: 2000,
            hidden_widths: vec![64, 64, 64, 64],
            activation: Activation::Tanh,
            train_seeds: vec![1, 2, 3, 4, 5, 6],
            sgd: SgdConfig {
                learning_rate: 0.05,
                epochs: 150,
                batch_size: 64,
            },
            probe: ProbeConfig {
                l2_penalty: 1e-3,
                iterations: 500,
            },
            data: DataConfig {
                modes_per_class: 2,
                mean_scale: 4.0,
                noise_scale: 1.0,
                data_seed: 7,
            },
            deletion_grid: None,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("input_dim", self.input_dim),
            ("n_train", self.n_train),
            ("n_eval", self.n_eval),
            ("batch_size", self.sgd.batch_size),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.n_classes < 2 {
            return Err(Error::InvalidConfig("n_classes must be at least 2".into()));
        }
        if self.hidden_widths.is_empty() || self.hidden_widths.contains(&0) {
            return Err(Error::InvalidConfig(
                "hidden_widths must be non-empty and positive".into(),
            ));
        }
        let max_width = *self.hidden_widths.iter().max().unwrap();
        if self.n_eval < max_width {
            return Err(Error::InvalidConfig(format!(
                "n_eval ({}) must be >= the widest hidden layer ({max_width}) to keep CCA well-posed",
                self.n_eval
            )));
        }
        if self.train_seeds.is_empty() {
            return Err(Error::InvalidConfig("train_seeds must be non-empty".into()));
        }
        if !(self.data.modes_per_class == 1 || self.data.modes_per_class == 2) {
            return Err(Error::InvalidConfig(
                "modes_per_class must be 1 or 2".into(),
            ));
        }
        if !self.sgd.learning_rate.is_finite() || self.sgd.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        Ok(())
    }

    /// The layer-depth suite configuration: seeds x hidden layers.
    pub fn preset_layer_depth() -> Self {
        Self::default()
    }

    /// The pc-deletion suite configuration: seeds x deletion grid at the
    /// deepest hidden layer, with the grid densified where detection
    /// thresholds land.
    pub fn preset_pc_deletion() -> Self {
        let base = Self::default();
        let width = *base.hidden_widths.last().unwrap();
        let grid = PcDeletionSpec::detection_default(width)
            .expect("default width grid")
            .k_values()
            .to_vec();
        Self {
            train_seeds: vec![1, 2, 3, 4, 5],
            deletion_grid: Some(grid),
            ..base
        }
    }
}

/// Which suite family to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuitePreset {
    LayerDepth,
    PcDeletion,
}

impl std::str::FromStr for SuitePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "layer-depth" | "layer_depth" => Ok(SuitePreset::LayerDepth),
            "pc-deletion" | "pc_deletion" => Ok(SuitePreset::PcDeletion),
            other => Err(Error::InvalidConfig(format!(
                "unknown preset {other:?}; expected layer-depth or pc-deletion"
            ))),
        }
    }
}

/// Files written by [`build_suite`].
#[derive(Debug, Clone)]
pub struct BuiltSuite {
    pub suite_path: PathBuf,
    pub suite: SuiteFile,
}

/// Train the configured models, extract and probe representations along the
/// preset's axes, and write everything (NPY files plus `suite.json`) under
/// `out_dir`.
pub fn build_suite(config: &SynthConfig, preset: SuitePreset, out_dir: &Path) -> Result<BuiltSuite> {
    config.validate()?;
    let dataset = generate_dataset(config, config.data.data_seed);
    let reps_dir = out_dir.join("reps");
    std::fs::create_dir_all(&reps_dir).map_err(|e| Error::io(&reps_dir, e))?;

    let trained: Vec<TrainedMlp> = config
        .train_seeds
        .par_iter()
        .map(|&seed| train_mlp(config, &dataset, seed))
        .collect::<Result<_>>()?;

    let mut entries = Vec::new();
    match preset {
        SuitePreset::LayerDepth => {
            let jobs: Vec<(usize, usize)> = (0..trained.len())
                .flat_map(|m| (0..config.hidden_widths.len()).map(move |l| (m, l)))
                .collect();
            let rows: Vec<(SuiteFileEntry, RawRepresentation)> = jobs
                .par_iter()
                .map(|&(m, l)| {
                    let seed = config.train_seeds[m];
                    let reps = extract_representations(&trained[m].mlp, &dataset)?;
                    let rep = reps.into_iter().nth(l).expect("layer in range");
                    let probe_seed = mix_seed(config.data.data_seed, seed, l as u64);
                    let result = linear_probe(
                        &rep,
                        &dataset.eval_labels,
                        "synthetic-class-probe",
                        &config.probe,
                        probe_seed,
                    )?;
                    let file = format!("reps/mlp-s{seed}-layer{l}.npy");
                    let entry = SuiteFileEntry {
                        path: file,
                        functionality: result.accuracy,
                        model_id: rep.model_id.clone(),
                        layer_id: l as u32,
                        tags: [
                            ("preset".to_string(), "layer-depth".to_string()),
                            ("seed".to_string(), seed.to_string()),
                        ]
                        .into(),
                        orientation: Orientation::NeuronsRows,
                    };
                    Ok((entry, rep))
                })
                .collect::<Result<_>>()?;
            for (entry, rep) in rows {
                write_matrix(&out_dir.join(&entry.path), &rep.data)?;
                entries.push(entry);
            }
        }
        SuitePreset::PcDeletion => {
            let layer = config.hidden_widths.len() - 1;
            let width = config.hidden_widths[layer];
            let grid = match &config.deletion_grid {
                Some(ks) => PcDeletionSpec::new(ks.clone(), width)?,
                None => PcDeletionSpec::scaled_default(width)?,
            };
            let jobs: Vec<(usize, usize)> = (0..trained.len())
                .flat_map(|m| grid.k_values().iter().map(move |&k| (m, k)))
                .collect();
            let rows: Vec<(SuiteFileEntry, RawRepresentation)> = jobs
                .par_iter()
                .map(|&(m, k)| {
                    let seed = config.train_seeds[m];
                    let reps = extract_representations(&trained[m].mlp, &dataset)?;
                    let full = reps.into_iter().nth(layer).expect("layer in range");
                    let deleted = delete_components(&full.data, k)?;
                    let rep = RawRepresentation::new(deleted, full.model_id.clone(), layer as u32)?;
                    let probe_seed = mix_seed(config.data.data_seed, seed, k as u64);
                    let result = linear_probe(
                        &rep,
                        &dataset.eval_labels,
                        "synthetic-class-probe",
                        &config.probe,
                        probe_seed,
                    )?;
                    let file = format!("reps/mlp-s{seed}-layer{layer}-k{k}.npy");
                    let entry = SuiteFileEntry {
                        path: file,
                        functionality: result.accuracy,
                        model_id: rep.model_id.clone(),
                        layer_id: layer as u32,
                        tags: [
                            ("preset".to_string(), "pc-deletion".to_string()),
                            ("seed".to_string(), seed.to_string()),
                            ("k".to_string(), k.to_string()),
                        ]
                        .into(),
                        orientation: Orientation::NeuronsRows,
                    };
                    Ok((entry, rep))
                })
                .collect::<Result<_>>()?;
            for (entry, rep) in rows {
                write_matrix(&out_dir.join(&entry.path), &rep.data)?;
                entries.push(entry);
            }
        }
    }

    let suite = SuiteFile {
        entries,
        reference_rule: Default::default(),
        include_reference_pair: true,
        centering: CenteringAxis::PerNeuron,
        metrics: MetricId::ALL.to_vec(),
    };
    let suite_path = out_dir.join("suite.json");
    write_suite(&suite_path, &suite)?;
    Ok(BuiltSuite { suite_path, suite })
}

/// splitmix64-style seed mixing so parallel jobs get independent,
/// reproducible streams.
pub(crate) fn mix_seed(a: u64, b: u64, c: u64) -> u64 {
    let mut z = a
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(b.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(c.wrapping_mul(0x94D0_49BB_1331_11EB));
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
