//! Pointwise linear algebra of twin metrics: `(h⁻¹g)² = εI`.
//!
//! Everything here works on constant matrices; the tensor engine calls into
//! it at sample points.

mod congruence;
mod involution;
mod takagi;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

pub use congruence::{simultaneous_congruence, CongruenceCase, CongruenceDecomposition, CongruenceInternals};
pub use involution::{involution_decompose, j0, InvolutionDecomposition, InvolutionKind};
pub use takagi::{takagi_like_factor, TakagiFactor};

/// Relative residual tolerance used when callers have no better idea.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix is {rows}×{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not symmetric (relative deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },
    #[error("matrix is singular (determinant {det:e})")]
    Singular { det: f64 },
    #[error("precondition `{identity}` violated (relative residual {residual:e})")]
    Precondition { identity: &'static str, residual: f64 },
    #[error("(h⁻¹g)² is not a multiple of the identity (relative deviation {deviation:e})")]
    NotAKPair { deviation: f64 },
    #[error("ε = {epsilon} < 0 is impossible in odd dimension {n}")]
    OddDimensionNegative { n: usize, epsilon: f64 },
    #[error("ε = 0 gives an almost-tangent structure, which is not supported")]
    AlmostTangent,
    #[error("matrix does not square to {epsilon}·I (relative residual {residual:e})")]
    NotAnInvolution { epsilon: f64, residual: f64 },
    #[error("an almost-complex structure needs even dimension, got {n}")]
    OddComplexDimension { n: usize },
    #[error("canonical forms need ε = ±1, got {epsilon}; rescale first")]
    NonCanonicalEpsilon { epsilon: f64 },
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
}

/// A real symmetric matrix, checked on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Accepts `m` when it is square and symmetric to 1e-12 relative; the
    /// stored matrix is the exact symmetric part.
    pub fn new(m: DMatrix<f64>) -> Result<Self, MatrixError> {
        if !m.is_square() {
            return Err(MatrixError::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        let scale = m.norm().max(f64::MIN_POSITIVE);
        let deviation = (&m - m.transpose()).norm() / scale;
        if deviation > 1e-12 {
            return Err(MatrixError::NotSymmetric { deviation });
        }
        Ok(Self((&m + m.transpose()) * 0.5))
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self, MatrixError> {
        if data.len() != n * n {
            return Err(MatrixError::DimensionMismatch(data.len(), n * n));
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Inverse; singular when the smallest eigenvalue magnitude is below
    /// `1e-13` of the largest.
    pub fn inverse(&self) -> Result<DMatrix<f64>, MatrixError> {
        let det = self.0.determinant();
        let eig = self.0.clone().symmetric_eigenvalues().abs();
        if self.n() > 0 && (eig.min() <= 1e-13 * eig.max() || !det.is_finite()) {
            return Err(MatrixError::Singular { det });
        }
        self.0.clone().try_inverse().ok_or(MatrixError::Singular { det })
    }
}

pub(crate) fn rel(diff: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    diff.norm() / reference.norm().max(f64::MIN_POSITIVE)
}

/// `‖K² − εI‖` relative to `max(‖K‖², ‖εI‖)`; rounding in `K²` grows
/// with `‖K‖²`.
fn square_residual(k: &DMatrix<f64>, epsilon: f64) -> f64 {
    let n = k.nrows();
    let target = DMatrix::<f64>::identity(n, n) * epsilon;
    let scale = (k.norm() * k.norm()).max(target.norm()).max(f64::MIN_POSITIVE);
    (k * k - &target).norm() / scale
}

/// Builds the twin `g = hK` of `h` under a K-structure with `K² = εI` and
/// `KᵗhK = εh`.
pub fn twin_from_k(h: &SymMatrix, k: &DMatrix<f64>, epsilon: f64, tol: f64) -> Result<SymMatrix, MatrixError> {
    let n = h.n();
    if k.nrows() != n || k.ncols() != n {
        return Err(MatrixError::DimensionMismatch(k.nrows(), n));
    }
    let residual = square_residual(k, epsilon);
    if residual > tol {
        return Err(MatrixError::Precondition { identity: "K² = εI", residual });
    }
    let hm = h.as_matrix();
    let residual = rel(&(k.transpose() * hm * k - hm * epsilon), hm);
    if residual > tol {
        return Err(MatrixError::Precondition { identity: "KᵗhK = εh", residual });
    }
    h.inverse()?;
    SymMatrix::new(hm * k)
}

/// Recovers `K = h⁻¹g` and the scalar `ε` with `K² = εI`.
pub fn k_from_pair(h: &SymMatrix, g: &SymMatrix, tol: f64) -> Result<(DMatrix<f64>, f64), MatrixError> {
    let n = h.n();
    if g.n() != n {
        return Err(MatrixError::DimensionMismatch(h.n(), g.n()));
    }
    g.inverse()?;
    h.inverse()?;
    let k = h.as_matrix().clone().lu().solve(g.as_matrix()).ok_or(MatrixError::Singular { det: 0.0 })?;
    let k2 = &k * &k;
    let epsilon = k2.trace() / n as f64;
    // rounding in K² scales with ‖K‖², which exceeds ‖K²‖ for badly
    // conditioned pairs
    let scale = (k.norm() * k.norm()).max(f64::MIN_POSITIVE);
    let deviation = (&k2 - DMatrix::<f64>::identity(n, n) * epsilon).norm() / scale;
    if deviation > tol || epsilon.abs() <= tol * scale {
        return Err(MatrixError::NotAKPair { deviation: deviation.max(tol) });
    }
    if n % 2 == 1 && epsilon < 0.0 {
        return Err(MatrixError::OddDimensionNegative { n, epsilon });
    }
    Ok((k, epsilon))
}

/// Rescales `g` by `1/√|ε|` so that `(h⁻¹g′)² = sign(ε)·I`.
pub fn rescale_to_canonical(
    h: &SymMatrix,
    g: &SymMatrix,
    epsilon: f64,
) -> Result<(SymMatrix, SymMatrix, f64), MatrixError> {
    if epsilon == 0.0 {
        return Err(MatrixError::AlmostTangent);
    }
    let g2 = SymMatrix(g.as_matrix() / epsilon.abs().sqrt());
    Ok((h.clone(), g2, epsilon.signum()))
}

/// Numbers of positive and negative eigenvalues.
pub fn signature(h: &SymMatrix) -> Result<(usize, usize), MatrixError> {
    let eig = SymmetricEigen::new(h.as_matrix().clone());
    let max = eig.eigenvalues.amax();
    if eig.eigenvalues.iter().any(|l| l.abs() <= 1e-12 * max) || max == 0.0 {
        return Err(MatrixError::Singular { det: h.as_matrix().determinant() });
    }
    let p = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count();
    Ok((p, h.n() - p))
}
