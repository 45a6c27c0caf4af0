use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::MatrixError;

/// `N` with `NᵗN = C` for a nondegenerate complex symmetric `C`.
#[derive(Clone, Debug)]
pub struct TakagiFactor {
    pub c: DMatrix<Complex64>,
    pub n: DMatrix<Complex64>,
}

impl TakagiFactor {
    /// `‖NᵗN − C‖ / ‖C‖`.
    pub fn residual(&self) -> f64 {
        let diff = self.n.transpose() * &self.n - &self.c;
        diff.norm() / self.c.norm().max(f64::MIN_POSITIVE)
    }
}

/// Factors `C = UΣUᵗ` with `U` unitary and returns `N = Σ^{1/2}Uᵗ`.
///
/// Writing `C = A + iB`, the real symmetric matrix `[[A, B], [B, −A]]` has
/// eigenvalues `±σ_k`; an eigenvector `(x; y)` for `σ_k > 0` gives the
/// Takagi vector `u_k = x + iy` with `C ū_k = σ_k u_k`.
pub fn takagi_like_factor(c: &DMatrix<Complex64>) -> Result<TakagiFactor, MatrixError> {
    if !c.is_square() {
        return Err(MatrixError::NotSquare { rows: c.nrows(), cols: c.ncols() });
    }
    let m = c.nrows();
    let scale = c.norm().max(f64::MIN_POSITIVE);
    let deviation = (c - c.transpose()).norm() / scale;
    if deviation > 1e-12 {
        return Err(MatrixError::NotSymmetric { deviation });
    }
    let mut h = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = (c[(i, j)] + c[(j, i)]) * 0.5;
            h[(i, j)] = z.re;
            h[(i, m + j)] = z.im;
            h[(m + i, j)] = z.im;
            h[(m + i, m + j)] = -z.re;
        }
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..2 * m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut n = DMatrix::<Complex64>::zeros(m, m);
    for (k, &idx) in order.iter().take(m).enumerate() {
        let sigma = eig.eigenvalues[idx];
        if sigma <= 1e-13 * scale {
            return Err(MatrixError::Singular { det: c.determinant().norm() });
        }
        let root = sigma.sqrt();
        let v = eig.eigenvectors.column(idx);
        for j in 0..m {
            n[(k, j)] = Complex64::new(v[j], v[m + j]) * root;
        }
    }
    Ok(TakagiFactor { c: c.clone(), n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_factor() {
        let f = takagi_like_factor(&DMatrix::identity(3, 3)).unwrap();
        assert!(f.residual() < 1e-14);
        // N is orthogonal real up to phase: NᵗN = I
        assert!((f.n.transpose() * &f.n - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-13);
    }

    #[test]
    fn square_root_of_2i() {
        let f = takagi_like_factor(&DMatrix::from_element(1, 1, c(0.0, 2.0))).unwrap();
        let z = f.n[(0, 0)];
        assert!((z * z - c(0.0, 2.0)).norm() < 1e-14);
        assert!((z.norm() - 2f64.sqrt()).abs() < 1e-14);
        assert!((z.re.abs() - 1.0).abs() < 1e-14 && (z.im.abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mixed_symmetric_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.5, -1.0), c(0.5, -1.0), c(-3.0, 0.25)]);
        let f = takagi_like_factor(&m).unwrap();
        assert!(f.residual() < 1e-13);
    }

    #[test]
    fn rejects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(1.0, 1.0), c(1.0, 1.0), c(1.0, 1.0)]);
        assert!(matches!(takagi_like_factor(&m), Err(MatrixError::Singular { .. })));
    }
}
