//! The five dissimilarity measures: linear centered kernel alignment, three
//! CCA summaries (mean, mean-squared, projection-weighted), and the
//! orthogonal Procrustes distance.
//!
//! All functions take matrices that have already been centered and
//! normalized (see [`crate::repcore::normalize`]); the measures themselves
//! never re-center. The CCA-family measures are asymmetric in their
//! arguments; the benchmark harness always passes the reference
//! representation first.

mod cca;

pub use cca::{cca, cca_with_tol, pwcca_weights, CcaResult, PwccaWeights};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repcore::{check_finite, nuclear_norm, Matrix};

/// Closed enumeration of the supported dissimilarity measures with stable
/// report names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    LinearCka,
    MeanCca,
    R2Cca,
    Pwcca,
    Procrustes,
}

impl MetricId {
    pub const ALL: [MetricId; 5] = [
        MetricId::LinearCka,
        MetricId::MeanCca,
        MetricId::R2Cca,
        MetricId::Pwcca,
        MetricId::Procrustes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::LinearCka => "linear_cka",
            MetricId::MeanCca => "mean_cca",
            MetricId::R2Cca => "r2_cca",
            MetricId::Pwcca => "pwcca",
            MetricId::Procrustes => "procrustes",
        }
    }

    /// True for measures where `d(a, b) == d(b, a)` holds by construction.
    pub fn is_symmetric(self) -> bool {
        matches!(self, MetricId::LinearCka | MetricId::Procrustes)
    }
}

impl std::fmt::Display for MetricId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear_cka" | "cka" => Ok(MetricId::LinearCka),
            "mean_cca" => Ok(MetricId::MeanCca),
            "r2_cca" => Ok(MetricId::R2Cca),
            "pwcca" => Ok(MetricId::Pwcca),
            "procrustes" => Ok(MetricId::Procrustes),
            other => Err(Error::InvalidConfig(format!(
                "unknown metric {other:?}; expected one of linear_cka, mean_cca, r2_cca, pwcca, procrustes"
            ))),
        }
    }
}

/// Single dispatch point for the harness.
pub fn distance(metric: MetricId, a: &Matrix, b: &Matrix) -> Result<f64> {
    match metric {
        MetricId::LinearCka => linear_cka_distance(a, b),
        MetricId::MeanCca => mean_cca_distance(a, b),
        MetricId::R2Cca => r2_cca_distance(a, b),
        MetricId::Pwcca => pwcca_distance(a, b),
        MetricId::Procrustes => procrustes_distance(a, b),
    }
}

/// Linear CKA distance: `1 - |a b^T|_F^2 / (|a a^T|_F * |b b^T|_F)`.
///
/// Symmetric and invariant to rescaling either argument.
pub fn linear_cka_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    check_shared_examples(a, b, "linear cka")?;
    check_finite(a, "linear cka first argument")?;
    check_finite(b, "linear cka second argument")?;
    let cross = a * b.transpose();
    let gram_a = (a * a.transpose()).norm();
    let gram_b = (b * b.transpose()).norm();
    if gram_a < 1e-300 || gram_b < 1e-300 {
        return Err(Error::ZeroMatrix {
            context: "linear cka gram norm underflow".into(),
        });
    }
    let alignment = cross.norm_squared() / (gram_a * gram_b);
    Ok((1.0 - alignment).clamp(0.0, 1.0))
}

/// Mean-CCA distance: `1 - (1/p1) * sum_i rho_i`.
///
/// Coefficients beyond the computable `min(rank(a), rank(b))` contribute
/// zero, and the denominator is the first argument's row count, so the
/// measure is asymmetric in `(a, b)`.
pub fn mean_cca_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    let result = cca(a, b)?;
    let sum: f64 = result.rho.iter().sum();
    Ok((1.0 - sum / a.nrows() as f64).clamp(0.0, 1.0))
}

/// Mean-squared-CCA distance: `1 - (1/p1) * sum_i rho_i^2`.
pub fn r2_cca_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    let result = cca(a, b)?;
    let sum: f64 = result.rho.iter().map(|r| r * r).sum();
    Ok((1.0 - sum / a.nrows() as f64).clamp(0.0, 1.0))
}

/// Projection-weighted CCA distance:
/// `1 - sum_i alpha_i rho_i / sum_i alpha_i` with
/// `alpha_i = sum_j |<h_i, a_j>|`.
///
/// The weights range over every direction of `a`'s whitened row space;
/// directions with no counterpart in `b` keep their weight but carry zero
/// correlation, so deleting components of `b` moves the distance by exactly
/// the projection mass `a` places on the deleted directions.
pub fn pwcca_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    let result = cca(a, b)?;
    let weights = pwcca_weights(&result, a);
    let total: f64 = weights.alpha.iter().sum();
    if total < 1e-300 {
        return Err(Error::DegenerateWeights);
    }
    let weighted: f64 = weights
        .alpha
        .iter()
        .zip(result.rho.iter().chain(std::iter::repeat(&0.0)))
        .map(|(alpha, rho)| alpha * rho)
        .sum();
    Ok((1.0 - weighted / total).clamp(0.0, 1.0))
}

/// Squared orthogonal Procrustes distance:
/// `|a|_F^2 + |b|_F^2 - 2 * |a b^T|_*`.
///
/// Symmetric; for unit-Frobenius inputs the value lies in [0, 2]. Tiny
/// negative rounding (<= 1e-10) is clamped to zero.
pub fn procrustes_distance(a: &Matrix, b: &Matrix) -> Result<f64> {
    check_shared_examples(a, b, "procrustes")?;
    check_finite(a, "procrustes first argument")?;
    check_finite(b, "procrustes second argument")?;
    let cross = a * b.transpose();
    let nuclear = nuclear_norm(&cross)?;
    let value = a.norm_squared() + b.norm_squared() - 2.0 * nuclear;
    Ok(value.max(0.0))
}

fn check_shared_examples(a: &Matrix, b: &Matrix, context: &str) -> Result<()> {
    if a.ncols() != b.ncols() {
        return Err(Error::ShapeMismatch {
            left: format!("{}x{}", a.nrows(), a.ncols()),
            right: format!("{}x{}", b.nrows(), b.ncols()),
            context: format!("{context} requires a shared example count"),
        });
    }
    Ok(())
}
