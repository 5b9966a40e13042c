//! Canonical correlation analysis over representation row spaces.
//!
//! Whitening goes through a column-pivoted QR of each transposed
//! representation followed by an SVD of the Q-factor product. The QR route
//! avoids forming covariance inverse square roots and truncates rank at a
//! relative tolerance, which keeps near-singular representations stable.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::perturb::orthonormal_complement;
use crate::repcore::{check_finite, Matrix, DEFAULT_REL_TOL};

/// Slack allowed on computed correlation coefficients before clamping into
/// [0, 1]; larger violations are treated as a failed solve.
const RHO_SLACK: f64 = 1e-8;

/// Canonical correlation coefficients, directions, and projections.
///
/// `projections_a` holds one row per direction of `a`'s whitened row space
/// (`rank_a` rows total): the first `n_components` rows are the canonical
/// projections `h_i` paired with `rho[i]`, and the remaining rows complete
/// the basis with zero assigned correlation. Projection-weighted summaries
/// need those trailing rows: they carry the part of `a` that has no
/// counterpart in `b`.
#[derive(Debug, Clone)]
pub struct CcaResult {
    /// Canonical correlation coefficients, non-increasing, clamped to [0, 1].
    pub rho: Vec<f64>,
    /// `p1 x rank_a` canonical directions for the first argument.
    pub directions_a: Matrix,
    /// `p2 x rank_b` canonical directions for the second argument.
    pub directions_b: Matrix,
    /// `rank_a x n` matrix whose rows are the projections `h_i`.
    pub projections_a: Matrix,
    /// Numerically effective `min(rank(a), rank(b))`.
    pub n_components: usize,
}

impl CcaResult {
    /// Effective rank of the first argument's row space.
    pub fn rank_a(&self) -> usize {
        self.projections_a.nrows()
    }
}

/// Projection weights for PWCCA: `alpha[i]` measures how much of `a` lies
/// along the i-th canonical projection.
#[derive(Debug, Clone)]
pub struct PwccaWeights {
    pub alpha: Vec<f64>,
}

pub fn cca(a: &Matrix, b: &Matrix) -> Result<CcaResult> {
    cca_with_tol(a, b, DEFAULT_REL_TOL)
}

pub fn cca_with_tol(a: &Matrix, b: &Matrix, rel_tol: f64) -> Result<CcaResult> {
    let n = a.ncols();
    if b.ncols() != n {
        return Err(Error::ShapeMismatch {
            left: format!("{}x{}", a.nrows(), a.ncols()),
            right: format!("{}x{}", b.nrows(), b.ncols()),
            context: "cca requires a shared example count".into(),
        });
    }
    let p_max = a.nrows().max(b.nrows());
    if n < p_max {
        return Err(Error::InsufficientSamples { n, p: p_max });
    }
    check_finite(a, "cca first argument")?;
    check_finite(b, "cca second argument")?;

    let wa = whiten_rows(a, rel_tol, "cca first argument")?;
    let wb = whiten_rows(b, rel_tol, "cca second argument")?;

    let cross = wa.q.transpose() * &wb.q;
    let svd = nalgebra::linalg::SVD::try_new(cross, true, true, f64::EPSILON, 0).ok_or(
        Error::ConvergenceFailure {
            context: "svd of whitened cross-covariance".into(),
        },
    )?;
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v_t requested").transpose();
    let n_components = svd.singular_values.len();

    let mut rho = Vec::with_capacity(n_components);
    for &s in svd.singular_values.iter() {
        if !(-RHO_SLACK..=1.0 + RHO_SLACK).contains(&s) {
            return Err(Error::ConvergenceFailure {
                context: format!("canonical correlation {s} outside [0, 1] beyond slack"),
            });
        }
        rho.push(s.clamp(0.0, 1.0));
    }

    // Complete a's rotation to a full basis of its whitened row space so
    // every direction of a gets a projection row.
    let basis_a = complete_basis(&u);
    let projections_a = (&wa.q * &basis_a).transpose();

    let directions_a = wa.directions(&basis_a);
    let directions_b = wb.directions(&v);

    Ok(CcaResult {
        rho,
        directions_a,
        directions_b,
        projections_a,
        n_components,
    })
}

/// PWCCA weights: `alpha[i] = sum_j |<h_i, a_j>|` over the rows `a_j` of `a`,
/// one weight per row of `projections_a`.
pub fn pwcca_weights(result: &CcaResult, a: &Matrix) -> PwccaWeights {
    let inner = &result.projections_a * a.transpose();
    let alpha = (0..inner.nrows())
        .map(|i| inner.row(i).iter().map(|x| x.abs()).sum())
        .collect();
    PwccaWeights { alpha }
}

struct Whitened {
    /// `n x rank` orthonormal basis of the row space.
    q: Matrix,
    /// Upper-triangular factor rows (rank x p) in pivoted order.
    r: Matrix,
    /// Column permutation applied by the pivoted QR.
    permutation: nalgebra::linalg::PermutationSequence<nalgebra::Dyn>,
    /// Ambient dimension (row count of the original representation).
    p: usize,
    rank: usize,
}

impl Whitened {
    /// Recover direction vectors `w` with `w^T * rep = (q * y)^T` for each
    /// column `y` of `basis`, using the truncated triangular factor.
    fn directions(&self, basis: &Matrix) -> Matrix {
        let r_lead = self.r.view((0, 0), (self.rank, self.rank));
        let mut out = Matrix::zeros(self.p, basis.ncols());
        for (j, y) in basis.column_iter().enumerate() {
            let mut z = DVector::zeros(self.rank);
            z.copy_from(&y);
            let solved = r_lead.solve_upper_triangular(&z).unwrap_or(z);
            let mut w = DVector::zeros(self.p);
            w.rows_mut(0, self.rank).copy_from(&solved);
            self.permutation.inv_permute_rows(&mut w);
            out.column_mut(j).copy_from(&w);
        }
        out
    }
}

/// Orthonormalize the row space of `rep` with rank truncation at
/// `rel_tol * |r_00|`.
fn whiten_rows(rep: &Matrix, rel_tol: f64, context: &str) -> Result<Whitened> {
    let p = rep.nrows();
    let qr = rep.transpose().col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    let lead = r[(0, 0)].abs();
    if lead < 1e-300 {
        return Err(Error::ZeroMatrix {
            context: context.to_string(),
        });
    }
    let rank = (0..r.nrows().min(r.ncols()))
        .take_while(|&i| r[(i, i)].abs() > rel_tol * lead)
        .count();
    Ok(Whitened {
        q: q.columns(0, rank).into_owned(),
        r: r.rows(0, rank).into_owned(),
        permutation: qr.p().clone(),
        p,
        rank,
    })
}

/// Extend the orthonormal columns of `u` (rank x k) to a full rank x rank
/// orthonormal basis, deterministically.
fn complete_basis(u: &Matrix) -> Matrix {
    let rank = u.nrows();
    let k = u.ncols();
    if k >= rank {
        return u.clone();
    }
    let complement = orthonormal_complement(u);
    let mut full = Matrix::zeros(rank, rank);
    full.columns_mut(0, k).copy_from(u);
    full.columns_mut(k, rank - k).copy_from(&complement);
    full
}
