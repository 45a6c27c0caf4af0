use nalgebra::{DMatrix, DVector};

use super::{square_residual, MatrixError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvolutionKind {
    /// `P² = I`, canonical form `D_k = diag(−I_k, I_{n−k})`.
    Product,
    /// `P² = −I`, canonical form `J₀ = [[0, I], [−I, 0]]`.
    Complex,
}

/// `P = M·C·M⁻¹` with `C` the canonical form of the kind.
#[derive(Clone, Debug)]
pub struct InvolutionDecomposition {
    pub kind: InvolutionKind,
    pub m: DMatrix<f64>,
    /// Dimension of the −1 eigenspace (product kind only).
    pub k: Option<usize>,
}

impl InvolutionDecomposition {
    pub fn canonical(&self) -> DMatrix<f64> {
        let n = self.m.nrows();
        match self.kind {
            InvolutionKind::Product => d_k(n, self.k.unwrap_or(0)),
            InvolutionKind::Complex => j0(n / 2),
        }
    }
}

pub(crate) fn d_k(n: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            0.0
        } else if i < k {
            -1.0
        } else {
            1.0
        }
    })
}

/// The canonical complex structure on ℝ^{2m}.
pub fn j0(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * m, 2 * m);
    for a in 0..m {
        j[(a, m + a)] = 1.0;
        j[(m + a, a)] = -1.0;
    }
    j
}

/// Brings a matrix with `P² = εI`, `ε = ±1`, to canonical form.
pub fn involution_decompose(p: &DMatrix<f64>, epsilon: f64, tol: f64) -> Result<InvolutionDecomposition, MatrixError> {
    if !p.is_square() {
        return Err(MatrixError::NotSquare { rows: p.nrows(), cols: p.ncols() });
    }
    if epsilon != 1.0 && epsilon != -1.0 {
        return Err(MatrixError::NonCanonicalEpsilon { epsilon });
    }
    let n = p.nrows();
    let residual = square_residual(p, epsilon);
    if residual > tol {
        return Err(MatrixError::NotAnInvolution { epsilon, residual });
    }
    if epsilon > 0.0 {
        product_basis(p)
    } else {
        if n % 2 == 1 {
            return Err(MatrixError::OddComplexDimension { n });
        }
        complex_basis(p)
    }
}

/// Orthonormal basis of the range of a projector of known rank, from a
/// column-pivoted QR.
fn range_basis(proj: &DMatrix<f64>, rank: usize) -> Vec<DVector<f64>> {
    let q = proj.clone().col_piv_qr().q();
    (0..rank).map(|i| q.column(i).into_owned()).collect()
}

fn product_basis(p: &DMatrix<f64>) -> Result<InvolutionDecomposition, MatrixError> {
    let n = p.nrows();
    // tr P = n − 2k
    let k_real = (n as f64 - p.trace()) / 2.0;
    let k = k_real.round();
    if (k_real - k).abs() > 0.25 || k < 0.0 || k > n as f64 {
        return Err(MatrixError::Degenerate(format!("trace of the involution gives a non-integer rank {k_real}")));
    }
    let k = k as usize;
    let id = DMatrix::<f64>::identity(n, n);
    let minus = range_basis(&((&id - p) * 0.5), k);
    let plus = range_basis(&((&id + p) * 0.5), n - k);
    let cols: Vec<DVector<f64>> = minus.into_iter().chain(plus).collect();
    Ok(InvolutionDecomposition { kind: InvolutionKind::Product, m: DMatrix::from_columns(&cols), k: Some(k) })
}

/// Pairs `v` with `w = −Pv` so that `P v = −w`, `P w = v`, which is the
/// column action of `J₀`.
fn complex_basis(p: &DMatrix<f64>) -> Result<InvolutionDecomposition, MatrixError> {
    let n = p.nrows();
    let m = n / 2;
    let mut ortho: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(m);
    let mut ws = Vec::with_capacity(m);
    let project_out = |x: &DVector<f64>, basis: &[DVector<f64>]| {
        let mut r = x.clone();
        for _ in 0..2 {
            for q in basis {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        r
    };
    for _ in 0..m {
        let (best, residual) = (0..n)
            .map(|i| {
                let r = project_out(&DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }), &ortho);
                let norm = r.norm();
                (r, norm)
            })
            .fold((DVector::zeros(n), -1.0), |acc, cand| if cand.1 > acc.1 + 1e-12 { cand } else { acc });
        if residual < 1e-8 {
            return Err(MatrixError::Degenerate("could not complete a J-adapted basis".into()));
        }
        let v = best / residual;
        let w = -(p * &v);
        for x in [&v, &w] {
            let r = project_out(x, &ortho);
            let norm = r.norm();
            if norm < 1e-8 {
                return Err(MatrixError::Degenerate("v and Pv are dependent on the current span".into()));
            }
            ortho.push(r / norm);
        }
        vs.push(v);
        ws.push(w);
    }
    let cols: Vec<DVector<f64>> = vs.into_iter().chain(ws).collect();
    Ok(InvolutionDecomposition { kind: InvolutionKind::Complex, m: DMatrix::from_columns(&cols), k: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstructs(p: &DMatrix<f64>, d: &InvolutionDecomposition) -> f64 {
        let back = &d.m * d.canonical() * d.m.clone().try_inverse().unwrap();
        (back - p).norm()
    }

    #[test]
    fn identity_has_k_zero() {
        let d = involution_decompose(&DMatrix::identity(4, 4), 1.0, 1e-9).unwrap();
        assert_eq!(d.k, Some(0));
        assert!(
            (d.m.clone() - DMatrix::<f64>::identity(4, 4)).norm() < 1e-12
                || reconstructs(&DMatrix::identity(4, 4), &d) < 1e-12
        );
    }

    #[test]
    fn swap_has_one_negative_direction() {
        let p = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let d = involution_decompose(&p, 1.0, 1e-9).unwrap();
        assert_eq!(d.k, Some(1));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // columns are ±(1,−1)/√2 then ±(1,1)/√2
        let c0 = d.m.column(0);
        let c1 = d.m.column(1);
        assert!((c0[0].abs() - s).abs() < 1e-12 && (c0[0] + c0[1]).abs() < 1e-12);
        assert!((c1[0].abs() - s).abs() < 1e-12 && (c1[0] - c1[1]).abs() < 1e-12);
        assert!(reconstructs(&p, &d) < 1e-12);
    }

    #[test]
    fn canonical_complex_structure_is_fixed() {
        let d = involution_decompose(&j0(2), -1.0, 1e-9).unwrap();
        assert_eq!(d.m, DMatrix::identity(4, 4));
    }

    #[test]
    fn rejects_bad_input() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(involution_decompose(&p, 1.0, 1e-9), Err(MatrixError::NotAnInvolution { .. })));
        assert!(matches!(
            involution_decompose(&DMatrix::identity(3, 3), -1.0, 1e-9),
            Err(MatrixError::NotAnInvolution { .. })
        ));
    }
}
