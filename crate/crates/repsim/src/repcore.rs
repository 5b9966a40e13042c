//! Core representation types, the normalization protocol, and shared
//! linear-algebra primitives (SVD, nuclear norm).
//!
//! A representation is a dense `p x n` matrix: `p` neurons observed on `n`
//! data points. Every metric in this crate expects representations that have
//! been centered and scaled to unit Frobenius norm; [`normalize`] is the one
//! place where that happens.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense double-precision matrix used throughout the crate.
pub type Matrix = DMatrix<f64>;

/// Relative threshold below which singular values are treated as zero for
/// rank decisions (CCA whitening, component deletion).
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Which mean is subtracted before scaling.
///
/// `PerNeuron` subtracts each row's mean over the `n` examples and is the
/// default: linear centered-kernel alignment is only meaningful on
/// feature-centered data. `PerExample` subtracts column means instead, and
/// `None` skips centering entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CenteringAxis {
    #[default]
    PerNeuron,
    PerExample,
    None,
}

impl CenteringAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            CenteringAxis::PerNeuron => "per_neuron",
            CenteringAxis::PerExample => "per_example",
            CenteringAxis::None => "none",
        }
    }
}

impl std::str::FromStr for CenteringAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_neuron" | "per-neuron" | "neuron" => Ok(CenteringAxis::PerNeuron),
            "per_example" | "per-example" | "example" => Ok(CenteringAxis::PerExample),
            "none" => Ok(CenteringAxis::None),
            other => Err(Error::InvalidConfig(format!(
                "unknown centering axis {other:?}; expected per-neuron, per-example, or none"
            ))),
        }
    }
}

/// A raw activation matrix plus the metadata needed to track where it came
/// from. Rows are neurons, columns are data points.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRepresentation {
    pub data: Matrix,
    pub model_id: String,
    pub layer_id: u32,
    pub tags: BTreeMap<String, String>,
}

impl RawRepresentation {
    pub fn new(data: Matrix, model_id: impl Into<String>, layer_id: u32) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidConfig(format!(
                "representation must be at least 1x1, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        check_finite(&data, "raw representation")?;
        Ok(Self {
            data,
            model_id: model_id.into(),
            layer_id,
            tags: BTreeMap::new(),
        })
    }

    pub fn with_tag(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.tags.insert(key.into(), value.into());
        self
    }

    /// Number of neurons (rows).
    pub fn neurons(&self) -> usize {
        self.data.nrows()
    }

    /// Number of data points (columns).
    pub fn examples(&self) -> usize {
        self.data.ncols()
    }
}

/// Where a normalized representation came from and how it was centered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub model_id: String,
    pub layer_id: u32,
    pub centering: CenteringAxis,
}

/// A centered, unit-Frobenius-norm representation: the only form the metrics
/// accept by default.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedRepresentation {
    pub data: Matrix,
    pub source: Provenance,
}

impl NormalizedRepresentation {
    pub fn neurons(&self) -> usize {
        self.data.nrows()
    }

    pub fn examples(&self) -> usize {
        self.data.ncols()
    }
}

/// Center along the chosen axis, then divide by the Frobenius norm.
///
/// Fails with [`Error::ZeroMatrix`] when the centered matrix has no mass left
/// (e.g. constant rows under per-neuron centering) and [`Error::NonFinite`]
/// on NaN/Inf input.
pub fn normalize(raw: &RawRepresentation, axis: CenteringAxis) -> Result<NormalizedRepresentation> {
    check_finite(&raw.data, "normalize input")?;
    let mut data = raw.data.clone();
    match axis {
        CenteringAxis::PerNeuron => {
            for mut row in data.row_iter_mut() {
                let mean = row.mean();
                row.add_scalar_mut(-mean);
            }
        }
        CenteringAxis::PerExample => {
            for mut col in data.column_iter_mut() {
                let mean = col.mean();
                col.add_scalar_mut(-mean);
            }
        }
        CenteringAxis::None => {}
    }
    let norm = data.norm();
    if norm < 1e-300 {
        return Err(Error::ZeroMatrix {
            context: format!("{} centering left nothing to normalize", axis.as_str()),
        });
    }
    data /= norm;
    Ok(NormalizedRepresentation {
        data,
        source: Provenance {
            model_id: raw.model_id.clone(),
            layer_id: raw.layer_id,
            centering: axis,
        },
    })
}

/// Thin singular value decomposition `data = u * diag(sigma) * v^T` with
/// deterministic ordering and signs.
///
/// `sigma` is sorted non-increasing. `effective_rank` counts the singular
/// values above `rel_tol * sigma_max`; values below it are still reported.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `p x r` matrix with orthonormal columns, `r = min(p, n)`.
    pub u: Matrix,
    /// `r` singular values, non-negative, non-increasing.
    pub sigma: DVector<f64>,
    /// `n x r` matrix with orthonormal columns.
    pub v: Matrix,
    /// Number of singular values treated as nonzero for rank decisions.
    pub effective_rank: usize,
    /// Relative tolerance used to flag numerically-zero singular values.
    pub rel_tol: f64,
}

impl SvdFactors {
    /// Reconstruct `u * diag(sigma) * v^T`.
    pub fn reconstruct(&self) -> Matrix {
        let scaled = Matrix::from_fn(self.u.nrows(), self.sigma.len(), |i, j| {
            self.u[(i, j)] * self.sigma[j]
        });
        scaled * self.v.transpose()
    }
}

/// Compute the SVD of `m` with the default rank tolerance.
pub fn svd(m: &Matrix) -> Result<SvdFactors> {
    svd_with_tol(m, DEFAULT_REL_TOL)
}

/// Compute the SVD of `m`, flagging singular values below
/// `rel_tol * sigma_max` as numerically zero.
///
/// Ordering ties between equal singular values are broken deterministically:
/// each left singular vector is sign-normalized so its largest-magnitude
/// entry (first such entry on ties) is positive.
pub fn svd_with_tol(m: &Matrix, rel_tol: f64) -> Result<SvdFactors> {
    check_finite(m, "svd input")?;
    let decomp = nalgebra::linalg::SVD::try_new(m.clone(), true, true, f64::EPSILON, 0).ok_or(
        Error::ConvergenceFailure {
            context: format!("svd of {}x{} matrix", m.nrows(), m.ncols()),
        },
    )?;
    let mut u = decomp.u.expect("u requested");
    let sigma = DVector::from_iterator(
        decomp.singular_values.len(),
        decomp.singular_values.iter().copied(),
    );
    let mut v = decomp.v_t.expect("v_t requested").transpose();
    canonicalize_signs(&mut u, &mut v);

    let sigma_max = sigma.max();
    let effective_rank = sigma.iter().filter(|&&s| s > rel_tol * sigma_max).count();
    Ok(SvdFactors {
        u,
        sigma,
        v,
        effective_rank,
        rel_tol,
    })
}

/// Sum of singular values.
pub fn nuclear_norm(m: &Matrix) -> Result<f64> {
    check_finite(m, "nuclear norm input")?;
    let sv = nalgebra::linalg::SVD::try_new(m.clone(), false, false, f64::EPSILON, 0).ok_or(
        Error::ConvergenceFailure {
            context: format!("singular values of {}x{} matrix", m.nrows(), m.ncols()),
        },
    )?;
    Ok(sv.singular_values.iter().sum())
}

/// Flip the sign of each (u, v) column pair so the largest-magnitude entry of
/// the u column is positive. Keeps repeated decompositions bit-identical.
fn canonicalize_signs(u: &mut Matrix, v: &mut Matrix) {
    for j in 0..u.ncols() {
        let mut pivot = 0usize;
        let mut best = 0.0f64;
        for i in 0..u.nrows() {
            let a = u[(i, j)].abs();
            if a > best {
                best = a;
                pivot = i;
            }
        }
        if u[(pivot, j)] < 0.0 {
            for i in 0..u.nrows() {
                u[(i, j)] = -u[(i, j)];
            }
            if j < v.ncols() {
                for i in 0..v.nrows() {
                    v[(i, j)] = -v[(i, j)];
                }
            }
        }
    }
}

pub(crate) fn check_finite(m: &Matrix, context: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: context.to_string(),
        })
    }
}

pub(crate) fn check_finite_slice(xs: &[f64], context: &str) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: context.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_matrix(p: usize, n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(p, n, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn normalize_rejects_constant_rows() {
        let raw =
            RawRepresentation::new(Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]), "m", 0)
                .unwrap();
        match normalize(&raw, CenteringAxis::PerNeuron) {
            Err(Error::ZeroMatrix { .. }) => {}
            other => panic!("expected ZeroMatrix, got {other:?}"),
        }
    }

    #[test]
    fn normalize_already_centered_input() {
        let raw =
            RawRepresentation::new(Matrix::from_row_slice(2, 2, &[1.0, -1.0, 0.0, 0.0]), "m", 0)
                .unwrap();
        let norm = normalize(&raw, CenteringAxis::PerNeuron).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(norm.data[(0, 0)], s, epsilon = 1e-15);
        assert_abs_diff_eq!(norm.data[(0, 1)], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(norm.data[(1, 0)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn normalize_random_matrix_contract() {
        let raw = RawRepresentation::new(random_matrix(8, 50, 7), "m", 0).unwrap();
        let norm = normalize(&raw, CenteringAxis::PerNeuron).unwrap();
        let n = norm.examples() as f64;
        for row in norm.data.row_iter() {
            assert!(row.sum().abs() <= 1e-9 * n);
        }
        assert_abs_diff_eq!(norm.data.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn normalize_is_idempotent() {
        let raw = RawRepresentation::new(random_matrix(6, 30, 11), "m", 0).unwrap();
        let once = normalize(&raw, CenteringAxis::PerNeuron).unwrap();
        let again_raw = RawRepresentation::new(once.data.clone(), "m", 0).unwrap();
        let twice = normalize(&again_raw, CenteringAxis::PerNeuron).unwrap();
        assert!((&once.data - &twice.data).norm() <= 1e-12);
    }

    #[test]
    fn normalize_rejects_nan() {
        let mut m = random_matrix(3, 3, 1);
        m[(1, 1)] = f64::NAN;
        let raw = RawRepresentation {
            data: m,
            model_id: "m".into(),
            layer_id: 0,
            tags: BTreeMap::new(),
        };
        match normalize(&raw, CenteringAxis::PerNeuron) {
            Err(Error::NonFinite { .. }) => {}
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn svd_diagonal_matrix() {
        let m = Matrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 1.0]));
        let f = svd(&m).unwrap();
        assert_abs_diff_eq!(f.sigma[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.sigma[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.sigma[2], 1.0, epsilon = 1e-12);
        assert_eq!(f.effective_rank, 3);
        // u equals identity up to column sign; sign canonicalization makes it exact.
        assert!((&f.u - Matrix::identity(3, 3)).norm() <= 1e-12);
    }

    #[test]
    fn svd_zero_matrix_has_rank_zero() {
        let m = Matrix::zeros(2, 3);
        let f = svd(&m).unwrap();
        assert_eq!(f.sigma.len(), 2);
        assert!(f.sigma.iter().all(|&s| s == 0.0));
        assert_eq!(f.effective_rank, 0);
    }

    #[test]
    fn svd_reconstructs_random_matrix() {
        let m = random_matrix(5, 7, 3);
        let f = svd(&m).unwrap();
        let err = (&f.reconstruct() - &m).norm() / m.norm();
        assert!(err <= 1e-8, "reconstruction error {err}");
        let gram_u = f.u.transpose() * &f.u;
        let gram_v = f.v.transpose() * &f.v;
        assert!((gram_u - Matrix::identity(5, 5)).norm() <= 1e-8);
        assert!((gram_v - Matrix::identity(5, 5)).norm() <= 1e-8);
    }

    #[test]
    fn svd_is_deterministic() {
        let m = random_matrix(6, 9, 21);
        let a = svd(&m).unwrap();
        let b = svd(&m).unwrap();
        assert_eq!(a.u, b.u);
        assert_eq!(a.sigma, b.sigma);
        assert_eq!(a.v, b.v);
    }

    #[test]
    fn nuclear_norm_examples() {
        assert_abs_diff_eq!(
            nuclear_norm(&Matrix::identity(3, 3)).unwrap(),
            3.0,
            epsilon = 1e-12
        );
        let d = Matrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
        assert_abs_diff_eq!(nuclear_norm(&d).unwrap(), 3.0, epsilon = 1e-12);
        let nilpotent = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(nuclear_norm(&nilpotent).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nuclear_norm_transpose_symmetry() {
        for seed in 0..5u64 {
            let m = random_matrix(4, 6, 100 + seed);
            let a = nuclear_norm(&m).unwrap();
            let b = nuclear_norm(&m.transpose()).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn singular_values_invariant_under_orthogonal_rotation() {
        let m = random_matrix(5, 8, 42);
        let q = crate::perturb::random_orthogonal(5, 9).unwrap();
        let rotated = &q * &m;
        let s1 = svd(&m).unwrap().sigma;
        let s2 = svd(&rotated).unwrap().sigma;
        for i in 0..s1.len() {
            assert_abs_diff_eq!(s1[i], s2[i], epsilon = 1e-8);
        }
    }
}
