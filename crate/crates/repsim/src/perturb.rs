//! Representation perturbations: principal-component deletion and seeded
//! random transforms used by the invariance suites and synthetic families.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::repcore::{svd_with_tol, Matrix, DEFAULT_REL_TOL};

/// A grid of deletion counts, strictly increasing, each valid for the target
/// representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcDeletionSpec {
    k_list: Vec<usize>,
}

impl PcDeletionSpec {
    pub fn new(k_list: Vec<usize>, p: usize) -> Result<Self> {
        if k_list.is_empty() {
            return Err(Error::InvalidConfig("k_list must be non-empty".into()));
        }
        for w in k_list.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidConfig(format!(
                    "k_list must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&last) = k_list.last() {
            if last >= p {
                return Err(Error::RankOutOfRange { k: last, p });
            }
        }
        Ok(Self { k_list })
    }

    pub fn k_values(&self) -> &[usize] {
        &self.k_list
    }

    /// The deletion grid used for width-768 encoder layers, rescaled
    /// proportionally to width `p` (duplicates dropped, capped at `p - 1`).
    pub fn scaled_default(p: usize) -> Result<Self> {
        const BASE_GRID: [usize; 14] = [
            0, 100, 200, 300, 400, 500, 600, 650, 700, 725, 750, 758, 763, 767,
        ];
        const BASE_WIDTH: f64 = 768.0;
        let mut ks: Vec<usize> = BASE_GRID
            .iter()
            .map(|&k| ((k as f64 / BASE_WIDTH) * p as f64).round() as usize)
            .map(|k| k.min(p.saturating_sub(1)))
            .collect();
        ks.sort_unstable();
        ks.dedup();
        Self::new(ks, p)
    }

    /// The scaled grid densified over the top 30% of components, where
    /// detection thresholds land; resolves threshold ordering that the
    /// coarse grid would bucket together.
    pub fn detection_default(p: usize) -> Result<Self> {
        let mut ks = Self::scaled_default(p)?.k_list;
        let tail_start = ((p as f64) * 0.7).ceil() as usize;
        ks.extend(tail_start..p);
        ks.sort_unstable();
        ks.dedup();
        Self::new(ks, p)
    }
}

/// Drop the `k` smallest principal components: returns `U_top^T * rep` where
/// `U_top` keeps the `p - k` left singular vectors with largest singular
/// values. Output has shape `(p - k) x n`.
pub fn delete_components(rep: &Matrix, k: usize) -> Result<Matrix> {
    delete_components_with_tol(rep, k, DEFAULT_REL_TOL)
}

pub fn delete_components_with_tol(rep: &Matrix, k: usize, rel_tol: f64) -> Result<Matrix> {
    let p = rep.nrows();
    if k >= p {
        return Err(Error::RankOutOfRange { k, p });
    }
    let factors = svd_with_tol(rep, rel_tol)?;
    let keep = p - k;
    let thin = factors.u.ncols();
    let u_top = if keep <= thin {
        factors.u.columns(0, keep).into_owned()
    } else {
        // Tall thin SVD (n < p) has only min(p, n) columns; complete the
        // basis so the output shape contract (p-k) x n still holds. The extra
        // directions are orthogonal to the column space, so they contribute
        // zero rows.
        let complement = orthonormal_complement(&factors.u);
        let mut full = Matrix::zeros(p, keep);
        full.columns_mut(0, thin).copy_from(&factors.u);
        full.columns_mut(thin, keep - thin)
            .copy_from(&complement.columns(0, keep - thin));
        full
    };
    Ok(u_top.transpose() * rep)
}

/// Deterministic orthonormal basis of the orthogonal complement of the
/// column span of `u` (which must have orthonormal columns).
pub(crate) fn orthonormal_complement(u: &Matrix) -> Matrix {
    let p = u.nrows();
    let r = u.ncols();
    if r >= p {
        return Matrix::zeros(p, 0);
    }
    let projector = Matrix::identity(p, p) - u * u.transpose();
    let qr = projector.col_piv_qr();
    let q = qr.q();
    let rmat = qr.r();
    let tol = 1e-12 * rmat[(0, 0)].abs().max(1.0);
    let rank = (0..rmat.nrows().min(rmat.ncols()))
        .take_while(|&i| rmat[(i, i)].abs() > tol)
        .count();
    q.columns(0, rank.min(p - r)).into_owned()
}

/// Haar-distributed orthogonal `p x p` matrix, deterministic per seed.
pub fn random_orthogonal(p: usize, seed: u64) -> Result<Matrix> {
    if p == 0 {
        return Err(Error::InvalidConfig("p must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Matrix::from_fn(p, p, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Sign correction makes the distribution Haar rather than QR-biased.
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            for i in 0..p {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// Seeded random invertible `p x p` matrix with condition number at most
/// `cond_max` (singular values clamped from below).
pub fn random_invertible(p: usize, seed: u64, cond_max: f64) -> Result<Matrix> {
    if p == 0 {
        return Err(Error::InvalidConfig("p must be >= 1".into()));
    }
    if cond_max < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "cond_max must be >= 1, got {cond_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Matrix::from_fn(p, p, |_, _| StandardNormal.sample(&mut rng));
    let factors = svd_with_tol(&g, DEFAULT_REL_TOL)?;
    let sigma_max = factors.sigma.max().max(1.0);
    let floor = sigma_max / cond_max;
    let clamped = DVector::from_iterator(p, factors.sigma.iter().map(|&s| s.max(floor)));
    let scaled = Matrix::from_fn(p, p, |i, j| factors.u[(i, j)] * clamped[j]);
    Ok(scaled * factors.v.transpose())
}

/// Square diagonal pair for closed-form oracle tests.
pub fn diagonal_family(sigma1: &[f64], sigma2: &[f64]) -> Result<(Matrix, Matrix)> {
    if sigma1.len() != sigma2.len() {
        return Err(Error::LengthMismatch {
            left: sigma1.len(),
            right: sigma2.len(),
        });
    }
    for (index, &value) in sigma1.iter().chain(sigma2.iter()).enumerate() {
        if value < 0.0 {
            return Err(Error::NegativeSingularValue {
                index: index % sigma1.len(),
                value,
            });
        }
    }
    let d1 = Matrix::from_diagonal(&DVector::from_column_slice(sigma1));
    let d2 = Matrix::from_diagonal(&DVector::from_column_slice(sigma2));
    Ok((d1, d2))
}
