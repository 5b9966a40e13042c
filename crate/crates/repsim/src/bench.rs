//! The benchmark procedure: assemble a suite of representations with
//! functionality scores, pick the reference, compute `|f(A) - f(B)|` and
//! `d(A, B)` for every entry, and report rank correlations per measure.
//! Also the experiment runners: pairwise layer matrices and
//! principal-component-deletion detection thresholds.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::{distance, MetricId};
use crate::perturb::delete_components;
use crate::repcore::{normalize, CenteringAxis, Matrix, NormalizedRepresentation, RawRepresentation};
use crate::stats::{rank_correlation, RankCorrelation};

/// How the reference representation is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceRule {
    /// Highest functionality wins; ties go to the smallest canonical index.
    #[default]
    ArgmaxF,
    /// Explicit canonical index into the sorted entry list.
    Explicit(usize),
}

/// Suite-level configuration shared by the benchmark and bootstrap runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    #[serde(default)]
    pub reference_rule: ReferenceRule,
    #[serde(default = "default_true")]
    pub include_reference_pair: bool,
    #[serde(default)]
    pub centering: CenteringAxis,
    #[serde(default = "all_metrics")]
    pub metrics: Vec<MetricId>,
}

fn default_true() -> bool {
    true
}

fn all_metrics() -> Vec<MetricId> {
    MetricId::ALL.to_vec()
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            reference_rule: ReferenceRule::ArgmaxF,
            include_reference_pair: true,
            centering: CenteringAxis::PerNeuron,
            metrics: all_metrics(),
        }
    }
}

/// Entry metadata: identity, perturbation tags, and the functionality score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntryMeta {
    pub model_id: String,
    pub layer_id: u32,
    pub functionality: f64,
    #[serde(default)]
    pub tags: BTreeMap<String, String>,
}

/// A suite entry with its representation loaded and normalized.
#[derive(Debug, Clone)]
pub struct LoadedEntry {
    pub meta: SuiteEntryMeta,
    pub rep: NormalizedRepresentation,
    /// Content hash of the raw matrix bytes (before normalization).
    pub raw_hash: [u8; 32],
}

/// A validated, canonically ordered suite ready to benchmark.
///
/// Entries are sorted by (model_id, layer_id, tags, functionality, raw
/// hash) at construction so every downstream artifact — reference choice,
/// pair table, fingerprint — is invariant to input ordering.
#[derive(Debug, Clone)]
pub struct LoadedSuite {
    entries: Vec<LoadedEntry>,
    config: SuiteConfig,
    fingerprint: String,
    examples: usize,
}

impl LoadedSuite {
    pub fn from_raw(raw_entries: Vec<(RawRepresentation, f64)>, config: SuiteConfig) -> Result<Self> {
        if raw_entries.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "a suite needs at least 2 entries, got {}",
                raw_entries.len()
            )));
        }
        if config.metrics.is_empty() {
            return Err(Error::InvalidConfig("metric list must be non-empty".into()));
        }
        let examples = raw_entries[0].0.examples();
        for (rep, f) in &raw_entries {
            if rep.examples() != examples {
                return Err(Error::MixedSampleCounts {
                    details: format!(
                        "{} layer {} has n = {}, expected {}",
                        rep.model_id,
                        rep.layer_id,
                        rep.examples(),
                        examples
                    ),
                });
            }
            if !f.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("functionality of {} layer {}", rep.model_id, rep.layer_id),
                });
            }
        }

        let mut entries = raw_entries
            .into_iter()
            .map(|(rep, functionality)| {
                let raw_hash = hash_matrix(&rep.data);
                let normalized = normalize(&rep, config.centering)?;
                Ok(LoadedEntry {
                    meta: SuiteEntryMeta {
                        model_id: rep.model_id,
                        layer_id: rep.layer_id,
                        functionality,
                        tags: rep.tags,
                    },
                    rep: normalized,
                    raw_hash,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        entries.sort_by(|a, b| {
            a.meta
                .model_id
                .cmp(&b.meta.model_id)
                .then(a.meta.layer_id.cmp(&b.meta.layer_id))
                .then_with(|| format!("{:?}", a.meta.tags).cmp(&format!("{:?}", b.meta.tags)))
                .then(a.meta.functionality.total_cmp(&b.meta.functionality))
                .then(a.raw_hash.cmp(&b.raw_hash))
        });

        if let ReferenceRule::Explicit(idx) = config.reference_rule {
            if idx >= entries.len() {
                return Err(Error::InvalidConfig(format!(
                    "explicit reference index {idx} out of range for {} entries",
                    entries.len()
                )));
            }
        }

        let fingerprint = fingerprint(&entries, &config);
        Ok(Self {
            entries,
            config,
            fingerprint,
            examples,
        })
    }

    pub fn entries(&self) -> &[LoadedEntry] {
        &self.entries
    }

    pub fn config(&self) -> &SuiteConfig {
        &self.config
    }

    /// Content hash of all raw matrices, scores, and configuration.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn examples(&self) -> usize {
        self.examples
    }

    /// Canonical index of the reference entry.
    pub fn reference_index(&self) -> usize {
        match self.config.reference_rule {
            ReferenceRule::Explicit(idx) => idx,
            ReferenceRule::ArgmaxF => {
                let mut best = 0usize;
                for (i, entry) in self.entries.iter().enumerate() {
                    if entry.meta.functionality > self.entries[best].meta.functionality {
                        best = i;
                    }
                }
                best
            }
        }
    }

    /// Full ordered distance matrix: entry `(i, j)` is `d(rep_i, rep_j)` with
    /// `rep_i` passed first (the reference slot).
    pub fn ordered_distance_matrix(&self, metric: MetricId) -> Result<Matrix> {
        let m = self.entries.len();
        let cells: Vec<f64> = (0..m * m)
            .into_par_iter()
            .map(|cell| {
                let (i, j) = (cell / m, cell % m);
                distance(metric, &self.entries[i].rep.data, &self.entries[j].rep.data)
            })
            .collect::<Result<_>>()?;
        Ok(Matrix::from_fn(m, m, |i, j| cells[i * m + j]))
    }
}

/// Per-metric correlation outcome: defined, or degenerate with a reason
/// (e.g. constant functionality differences).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CorrelationOutcome {
    Defined(RankCorrelation),
    Degenerate { reason: String },
}

/// One row of the pair table: `|f(A) - f(B)|` and `d(A, B)` per metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub entry_index: usize,
    pub model_id: String,
    pub layer_id: u32,
    pub delta_f: f64,
    pub distances: BTreeMap<MetricId, f64>,
}

/// The benchmark output: rank correlations per metric plus the underlying
/// pair table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub reference_index: usize,
    pub reference_model_id: String,
    pub reference_layer_id: u32,
    pub correlations: BTreeMap<MetricId, CorrelationOutcome>,
    pub pairs: Vec<PairRow>,
    pub suite_fingerprint: String,
    pub tool_version: String,
    pub entries: usize,
}

/// Run the benchmark procedure on a loaded suite.
pub fn run_benchmark(suite: &LoadedSuite) -> Result<BenchmarkReport> {
    let config = suite.config();
    let entries = suite.entries();
    let ref_idx = suite.reference_index();
    let reference = &entries[ref_idx];

    let row_indices: Vec<usize> = (0..entries.len())
        .filter(|&j| config.include_reference_pair || j != ref_idx)
        .collect();

    let pairs: Vec<PairRow> = row_indices
        .par_iter()
        .map(|&j| {
            let entry = &entries[j];
            let mut distances = BTreeMap::new();
            for &metric in &config.metrics {
                let d = distance(metric, &reference.rep.data, &entry.rep.data)?;
                distances.insert(metric, d);
            }
            Ok(PairRow {
                entry_index: j,
                model_id: entry.meta.model_id.clone(),
                layer_id: entry.meta.layer_id,
                delta_f: (reference.meta.functionality - entry.meta.functionality).abs(),
                distances,
            })
        })
        .collect::<Result<_>>()?;

    let delta_f: Vec<f64> = pairs.iter().map(|p| p.delta_f).collect();
    let mut correlations = BTreeMap::new();
    for &metric in &config.metrics {
        let d: Vec<f64> = pairs.iter().map(|p| p.distances[&metric]).collect();
        let outcome = match rank_correlation(&delta_f, &d) {
            Ok(rc) => CorrelationOutcome::Defined(rc),
            Err(Error::DegenerateInput { context }) => {
                CorrelationOutcome::Degenerate { reason: context }
            }
            Err(other) => return Err(other),
        };
        correlations.insert(metric, outcome);
    }

    Ok(BenchmarkReport {
        reference_index: ref_idx,
        reference_model_id: reference.meta.model_id.clone(),
        reference_layer_id: reference.meta.layer_id,
        correlations,
        pairs,
        suite_fingerprint: suite.fingerprint().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        entries: entries.len(),
    })
}

/// Cross-model and within-model layer distance matrices for heatmap tables.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerMatrices {
    /// `L1 x L2`: entry `(i, j)` is `d(a_i, b_j)` with `a_i` first.
    pub cross: Matrix,
    /// `L1 x L1` distances within the first model.
    pub within_a: Matrix,
    /// `L2 x L2` distances within the second model.
    pub within_b: Matrix,
}

/// Pairwise distances between every layer of two models, plus the
/// within-model matrices.
pub fn pairwise_layer_matrix(
    model_a: &[NormalizedRepresentation],
    model_b: &[NormalizedRepresentation],
    metric: MetricId,
) -> Result<LayerMatrices> {
    if model_a.is_empty() || model_b.is_empty() {
        return Err(Error::InvalidConfig("both models need at least one layer".into()));
    }
    let n = model_a[0].examples();
    for rep in model_a.iter().chain(model_b.iter()) {
        if rep.examples() != n {
            return Err(Error::MixedSampleCounts {
                details: format!(
                    "{} layer {} has n = {}, expected {}",
                    rep.source.model_id,
                    rep.source.layer_id,
                    rep.examples(),
                    n
                ),
            });
        }
    }
    Ok(LayerMatrices {
        cross: pairwise(model_a, model_b, metric)?,
        within_a: pairwise(model_a, model_a, metric)?,
        within_b: pairwise(model_b, model_b, metric)?,
    })
}

fn pairwise(
    rows: &[NormalizedRepresentation],
    cols: &[NormalizedRepresentation],
    metric: MetricId,
) -> Result<Matrix> {
    let (r, c) = (rows.len(), cols.len());
    let cells: Vec<f64> = (0..r * c)
        .into_par_iter()
        .map(|cell| distance(metric, &rows[cell / c].data, &cols[cell % c].data))
        .collect::<Result<_>>()?;
    Ok(Matrix::from_fn(r, c, |i, j| cells[i * c + j]))
}

/// Deletion curve and the smallest deletion count whose distance exceeds the
/// baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    /// `(k, d(rep, rep with k components deleted))`, sorted by `k`.
    pub curve: Vec<(usize, f64)>,
    pub baseline: f64,
    /// Smallest `k` with distance strictly above the baseline, if any.
    pub threshold_k: Option<usize>,
    /// `threshold_k / p`.
    pub threshold_fraction: Option<f64>,
}

/// Compute the deletion curve of `rep` under `metric` and locate the
/// detection threshold against `baseline`.
///
/// Distances are taken on the matrices as given (deleted variants are not
/// re-normalized), so for procrustes the curve is exactly the tail sum of
/// squared singular values. Normalize `rep` upstream to follow the standard
/// protocol.
pub fn detection_threshold(
    rep: &Matrix,
    k_list: &[usize],
    metric: MetricId,
    baseline: f64,
) -> Result<DetectionResult> {
    if baseline < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "baseline must be >= 0, got {baseline}"
        )));
    }
    let spec = crate::perturb::PcDeletionSpec::new(k_list.to_vec(), rep.nrows())?;
    let curve: Vec<(usize, f64)> = spec
        .k_values()
        .par_iter()
        .map(|&k| {
            let deleted = delete_components(rep, k)?;
            let d = distance(metric, rep, &deleted)?;
            Ok((k, d))
        })
        .collect::<Result<_>>()?;
    let threshold_k = curve.iter().find(|(_, d)| *d > baseline).map(|(k, _)| *k);
    let threshold_fraction = threshold_k.map(|k| k as f64 / rep.nrows() as f64);
    Ok(DetectionResult {
        curve,
        baseline,
        threshold_k,
        threshold_fraction,
    })
}

/// Mean distance over all ordered cross-seed pairs of same-layer
/// representations (ordered because the CCA-family measures are asymmetric).
/// Pass representations that already follow the normalization protocol.
pub fn cross_seed_baseline(reps: &[Matrix], metric: MetricId) -> Result<f64> {
    if reps.len() < 2 {
        return Err(Error::TooFewSamples {
            n: reps.len(),
            min: 2,
        });
    }
    let m = reps.len();
    let ordered: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let total: f64 = ordered
        .par_iter()
        .map(|&(i, j)| distance(metric, &reps[i], &reps[j]))
        .try_reduce(|| 0.0, |a, b| Ok(a + b))?;
    Ok(total / ordered.len() as f64)
}

/// Apply the normalization protocol to a bare matrix.
pub fn normalize_matrix(m: &Matrix, context: &str, centering: CenteringAxis) -> Result<Matrix> {
    let raw = RawRepresentation::new(m.clone(), context, 0)?;
    Ok(normalize(&raw, centering)?.data)
}

fn hash_matrix(m: &Matrix) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update((m.nrows() as u64).to_le_bytes());
    hasher.update((m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            hasher.update(m[(i, j)].to_le_bytes());
        }
    }
    hasher.finalize().into()
}

fn fingerprint(entries: &[LoadedEntry], config: &SuiteConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"repsim-suite-v1");
    let config_json = serde_json::to_string(config).expect("config serializes");
    hasher.update(config_json.as_bytes());
    for entry in entries {
        hasher.update(entry.meta.model_id.as_bytes());
        hasher.update(entry.meta.layer_id.to_le_bytes());
        hasher.update(entry.meta.functionality.to_le_bytes());
        for (k, v) in &entry.meta.tags {
            hasher.update(k.as_bytes());
            hasher.update(b"=");
            hasher.update(v.as_bytes());
            hasher.update(b";");
        }
        hasher.update(entry.raw_hash);
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}
