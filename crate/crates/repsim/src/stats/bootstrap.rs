//! Bootstrap comparison of rank correlations between dissimilarity measures.
//!
//! Each resample draws the suite with replacement, re-picks the reference as
//! the maximum-functionality entry within the resample, recomputes both rank
//! correlations per measure, and records all pairwise correlation
//! differences. Percentile confidence intervals that exclude zero mark a
//! significant difference.
//!
//! Resample `r` draws from an RNG stream derived deterministically from
//! `(seed, r)`, so reports are identical regardless of execution order or
//! thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::LoadedSuite;
use crate::error::{Error, Result};
use crate::metrics::MetricId;
use crate::repcore::Matrix;
use crate::stats::{kendall, spearman};

/// Which rank correlation a bootstrap report compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankStatistic {
    Rho,
    Tau,
}

impl std::fmt::Display for RankStatistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RankStatistic::Rho => "rho",
            RankStatistic::Tau => "tau",
        })
    }
}

/// Resampled distribution of the difference in one rank statistic between a
/// pair of measures, with its 95% percentile interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub pair: (MetricId, MetricId),
    pub statistic: RankStatistic,
    /// One difference (first minus second) per usable resample.
    pub diffs: Vec<f64>,
    /// 2.5th percentile (nearest rank) of `diffs`.
    pub ci_low: f64,
    /// 97.5th percentile (nearest rank) of `diffs`.
    pub ci_high: f64,
    /// True when the interval excludes zero.
    pub significant: bool,
    /// Requested resample count.
    pub resamples: usize,
    pub seed: u64,
    /// Resamples skipped because a correlation was undefined on them
    /// (constant functionality or constant distances).
    pub degenerate_resamples: usize,
}

/// Run the bootstrap protocol on a loaded suite.
pub fn bootstrap_compare(
    suite: &LoadedSuite,
    metrics: &[MetricId],
    resamples: usize,
    seed: u64,
) -> Result<Vec<BootstrapReport>> {
    if suite.entries().len() < 3 {
        return Err(Error::TooFewSamples {
            n: suite.entries().len(),
            min: 3,
        });
    }
    let functionality: Vec<f64> = suite.entries().iter().map(|e| e.meta.functionality).collect();
    let matrices: Vec<(MetricId, Matrix)> = metrics
        .iter()
        .map(|&m| Ok((m, suite.ordered_distance_matrix(m)?)))
        .collect::<Result<_>>()?;
    bootstrap_compare_matrices(&functionality, &matrices, resamples, seed)
}

/// Core bootstrap over precomputed ordered distance matrices.
///
/// `distances[m]` is the full `|S| x |S|` matrix with entry `(i, j)` equal to
/// `d(rep_i, rep_j)` — reference first, which matters for the asymmetric
/// CCA-family measures. Precomputing it makes each resample a table lookup.
pub fn bootstrap_compare_matrices(
    functionality: &[f64],
    distances: &[(MetricId, Matrix)],
    resamples: usize,
    seed: u64,
) -> Result<Vec<BootstrapReport>> {
    let m = functionality.len();
    if m < 3 {
        return Err(Error::TooFewSamples { n: m, min: 3 });
    }
    if distances.len() < 2 {
        return Err(Error::InvalidConfig(
            "bootstrap comparison needs at least two metrics".into(),
        ));
    }
    if resamples == 0 {
        return Err(Error::InvalidConfig("resamples must be >= 1".into()));
    }
    for (metric, d) in distances {
        if d.nrows() != m || d.ncols() != m {
            return Err(Error::ShapeMismatch {
                left: format!("{}x{}", d.nrows(), d.ncols()),
                right: format!("{m}x{m}"),
                context: format!("distance matrix for {metric}"),
            });
        }
    }

    let n_metrics = distances.len();
    // Per resample: rho and tau for each metric, or None when degenerate.
    let per_resample: Vec<Option<Vec<(f64, f64)>>> = (0..resamples)
        .into_par_iter()
        .map(|r| one_resample(functionality, distances, seed, r as u64))
        .collect();

    let degenerate = per_resample.iter().filter(|x| x.is_none()).count();

    let mut reports = Vec::new();
    for i in 0..n_metrics {
        for j in (i + 1)..n_metrics {
            for statistic in [RankStatistic::Rho, RankStatistic::Tau] {
                let diffs: Vec<f64> = per_resample
                    .iter()
                    .flatten()
                    .map(|vals| match statistic {
                        RankStatistic::Rho => vals[i].0 - vals[j].0,
                        RankStatistic::Tau => vals[i].1 - vals[j].1,
                    })
                    .collect();
                if diffs.is_empty() {
                    return Err(Error::DegenerateInput {
                        context: "every bootstrap resample was degenerate".into(),
                    });
                }
                let mut sorted = diffs.clone();
                sorted.sort_by(f64::total_cmp);
                let ci_low = percentile_nearest_rank(&sorted, 2.5);
                let ci_high = percentile_nearest_rank(&sorted, 97.5);
                reports.push(BootstrapReport {
                    pair: (distances[i].0, distances[j].0),
                    statistic,
                    ci_low,
                    ci_high,
                    significant: ci_low > 0.0 || ci_high < 0.0,
                    resamples,
                    seed,
                    degenerate_resamples: degenerate,
                    diffs,
                });
            }
        }
    }
    Ok(reports)
}

fn one_resample(
    functionality: &[f64],
    distances: &[(MetricId, Matrix)],
    seed: u64,
    resample: u64,
) -> Option<Vec<(f64, f64)>> {
    let m = functionality.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(resample.wrapping_add(1));
    let indices: Vec<usize> = (0..m).map(|_| rng.random_range(0..m)).collect();

    // Reference: maximum functionality within the resample; first occurrence
    // in draw order wins on ties.
    let mut ref_pos = 0usize;
    for (pos, &idx) in indices.iter().enumerate() {
        if functionality[idx] > functionality[indices[ref_pos]] {
            ref_pos = pos;
        }
    }
    let ref_idx = indices[ref_pos];

    let f_ref = functionality[ref_idx];
    let x: Vec<f64> = indices.iter().map(|&i| (f_ref - functionality[i]).abs()).collect();

    let mut out = Vec::with_capacity(distances.len());
    for (_, d) in distances {
        let y: Vec<f64> = indices.iter().map(|&i| d[(ref_idx, i)]).collect();
        let rho = match spearman(&x, &y) {
            Ok(v) => v,
            Err(_) => return None,
        };
        let tau = match kendall(&x, &y) {
            Ok(v) => v,
            Err(_) => return None,
        };
        out.push((rho, tau));
    }
    Some(out)
}

/// Nearest-rank percentile of an ascending-sorted slice.
pub fn percentile_nearest_rank(sorted: &[f64], percentile: f64) -> f64 {
    let len = sorted.len();
    let rank = ((percentile / 100.0) * len as f64).ceil() as usize;
    sorted[rank.clamp(1, len) - 1]
}
