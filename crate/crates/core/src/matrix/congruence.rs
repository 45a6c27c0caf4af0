use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::involution::{involution_decompose, j0};
use super::takagi::takagi_like_factor;
use super::{k_from_pair, rel, MatrixError, SymMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CongruenceCase {
    Product,
    Complex,
}

/// Intermediate matrices of the construction. `s`, `u`, `a`, `b` and
/// `takagi` are only present in the complex case.
#[derive(Clone, Debug)]
pub struct CongruenceInternals {
    /// Adapted basis: `h⁻¹g = M·C·M⁻¹` with `C` canonical.
    pub m: DMatrix<f64>,
    /// Block assembler with `MᵗhM = SᵗD_hS`.
    pub s: DMatrix<f64>,
    pub a: Option<DMatrix<f64>>,
    pub b: Option<DMatrix<f64>>,
    pub re_n: Option<DMatrix<f64>>,
    pub im_n: Option<DMatrix<f64>>,
    pub takagi_n: Option<DMatrix<Complex64>>,
    pub takagi_residual: Option<f64>,
}

/// `h = RᵗD_hR`, `g = RᵗD_gR` with canonical `D_h`, `D_g`.
#[derive(Clone, Debug)]
pub struct CongruenceDecomposition {
    pub case: CongruenceCase,
    pub r: DMatrix<f64>,
    pub d_h: DMatrix<f64>,
    pub d_g: DMatrix<f64>,
    /// Dimension of the −1 eigenspace of `h⁻¹g` (product case).
    pub k: Option<usize>,
    pub internals: CongruenceInternals,
}

impl CongruenceDecomposition {
    /// Relative reconstruction residuals for `h` and `g`.
    pub fn residuals(&self, h: &SymMatrix, g: &SymMatrix) -> (f64, f64) {
        let rt = self.r.transpose();
        let hm = h.as_matrix();
        let gm = g.as_matrix();
        (rel(&(&rt * &self.d_h * &self.r - hm), hm), rel(&(&rt * &self.d_g * &self.r - gm), gm))
    }
}

/// Gate on `(h⁻¹g)² = ±I` before decomposing. Looser than the
/// reconstruction target because `h⁻¹g` carries the conditioning of `h`.
pub const PRECONDITION_TOLERANCE: f64 = 1e-7;

/// Simultaneously brings `h` and `g` to canonical form. Requires
/// `(h⁻¹g)² = ±I`; rescale first otherwise.
pub fn simultaneous_congruence(h: &SymMatrix, g: &SymMatrix) -> Result<CongruenceDecomposition, MatrixError> {
    let (p, epsilon) = k_from_pair(h, g, PRECONDITION_TOLERANCE)?;
    let n = p.nrows().max(1) as f64;
    if (epsilon.abs() - 1.0).abs() > PRECONDITION_TOLERANCE * (p.norm_squared() / n).max(1.0) {
        return Err(MatrixError::NonCanonicalEpsilon { epsilon });
    }
    let epsilon = epsilon.signum();
    let inv = involution_decompose(&p, epsilon, PRECONDITION_TOLERANCE)?;
    let m = inv.m.clone();
    if epsilon > 0.0 {
        let ht = m.transpose() * h.as_matrix() * &m;
        let ht = (&ht + ht.transpose()) * 0.5;
        product_case(&ht, m, h.as_matrix(), inv.k.unwrap_or(0))
    } else {
        complex_case(m, h.as_matrix(), g.as_matrix())
    }
}

/// `ht = Sᵗ·diag(sign λ)·S` via `ht = QΛQᵗ`, positives first.
fn sylvester(ht: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>), MatrixError> {
    let n = ht.nrows();
    if n == 0 {
        return Ok((DMatrix::zeros(0, 0), vec![]));
    }
    let eig = SymmetricEigen::new(ht.clone());
    let max = eig.eigenvalues.amax();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut s = DMatrix::zeros(n, n);
    let mut signs = Vec::with_capacity(n);
    for (row, &i) in order.iter().enumerate() {
        let l = eig.eigenvalues[i];
        if l.abs() <= 1e-13 * max {
            return Err(MatrixError::Degenerate("block lost rank during diagonalization".into()));
        }
        let q = eig.eigenvectors.column(i);
        let root = l.abs().sqrt();
        for j in 0..n {
            s[(row, j)] = root * q[j];
        }
        signs.push(l.signum());
    }
    Ok((s, signs))
}

/// `R = S·M⁻¹`. Since `M⁻¹ = h̃⁻¹Mᵗh` and `h̃ = SᵗD_hS`, this equals
/// `D_h·S⁻ᵗ·Mᵗh`, which never inverts the adapted basis `M`.
fn assemble_r(s: &DMatrix<f64>, m: &DMatrix<f64>, d_h: &[f64], h: &DMatrix<f64>) -> Result<DMatrix<f64>, MatrixError> {
    assemble_r_from(s, &(m.transpose() * h), d_h)
}

fn assemble_r_from(s: &DMatrix<f64>, mth: &DMatrix<f64>, d_h: &[f64]) -> Result<DMatrix<f64>, MatrixError> {
    let x =
        s.transpose().lu().solve(mth).ok_or_else(|| MatrixError::Degenerate("block assembler is singular".into()))?;
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d_h)) * x)
}

fn product_case(
    ht: &DMatrix<f64>,
    m: DMatrix<f64>,
    h: &DMatrix<f64>,
    k: usize,
) -> Result<CongruenceDecomposition, MatrixError> {
    let n = ht.nrows();
    let off = ht.view((0, k), (k, n - k)).norm();
    if off > 1e-8 * ht.norm() {
        return Err(MatrixError::Degenerate(format!("transported h does not commute with D_k (off-block {off:e})")));
    }
    let (s1, d1) = sylvester(&ht.view((0, 0), (k, k)).into_owned())?;
    let (s2, d2) = sylvester(&ht.view((k, k), (n - k, n - k)).into_owned())?;
    let mut s = DMatrix::zeros(n, n);
    s.view_mut((0, 0), (k, k)).copy_from(&s1);
    s.view_mut((k, k), (n - k, n - k)).copy_from(&s2);
    let pairs: Vec<(f64, f64)> = d1.iter().map(|&d| (d, -d)).chain(d2.iter().map(|&d| (d, d))).collect();

    // order rows as (+,+), (+,−), (−,+), (−,−)
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (pairs[i].0 < 0.0, pairs[i].1 < 0.0));
    let r_unsorted = assemble_r(&s, &m, &pairs.iter().map(|p| p.0).collect::<Vec<_>>(), h)?;
    let r = DMatrix::from_fn(n, n, |i, j| r_unsorted[(order[i], j)]);
    let d_h = DMatrix::from_fn(n, n, |i, j| if i == j { pairs[order[i]].0 } else { 0.0 });
    let d_g = DMatrix::from_fn(n, n, |i, j| if i == j { pairs[order[i]].1 } else { 0.0 });
    Ok(CongruenceDecomposition {
        case: CongruenceCase::Product,
        r,
        d_h,
        d_g,
        k: Some(k),
        internals: CongruenceInternals {
            m,
            s,
            a: None,
            b: None,
            re_n: None,
            im_n: None,
            takagi_n: None,
            takagi_residual: None,
        },
    })
}

/// With `M = (V | −PV)`, the identities `PᵗhP = −h` and `hP = g` give
/// `h̃ = [[VᵗhV, −VᵗgV], [−VᵗgV, −VᵗhV]]` and `Mᵗh = (Vᵗh; −Vᵗg)`, so the
/// blocks and `R` are formed from `h`, `g` and `V` alone; `P` only enters
/// through the choice of `V`.
fn complex_case(m: DMatrix<f64>, h: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<CongruenceDecomposition, MatrixError> {
    let n = m.nrows();
    let half = n / 2;
    let v = m.columns(0, half).into_owned();
    let vt = v.transpose();
    let a = &vt * h * &v;
    let a = (&a + a.transpose()) * 0.5;
    let b = -(&vt * g * &v);
    let b = (&b + b.transpose()) * 0.5;
    let c = DMatrix::from_fn(half, half, |i, j| Complex64::new(a[(i, j)], b[(i, j)]));
    let factor = takagi_like_factor(&c)?;
    let re_n = factor.n.map(|z| z.re);
    let im_n = factor.n.map(|z| z.im);
    let mut s = DMatrix::zeros(n, n);
    s.view_mut((0, 0), (half, half)).copy_from(&re_n);
    s.view_mut((0, half), (half, half)).copy_from(&im_n);
    s.view_mut((half, 0), (half, half)).copy_from(&(-&im_n));
    s.view_mut((half, half), (half, half)).copy_from(&re_n);
    let mut mth = DMatrix::zeros(n, n);
    mth.view_mut((0, 0), (half, n)).copy_from(&(&vt * h));
    mth.view_mut((half, 0), (half, n)).copy_from(&(-(&vt * g)));
    let mut d_h = DMatrix::zeros(n, n);
    let mut d_g = DMatrix::zeros(n, n);
    for i in 0..half {
        d_h[(i, i)] = 1.0;
        d_h[(half + i, half + i)] = -1.0;
        d_g[(i, half + i)] = 1.0;
        d_g[(half + i, i)] = 1.0;
    }
    debug_assert_eq!(&d_h * j0(half), d_g);
    Ok(CongruenceDecomposition {
        case: CongruenceCase::Complex,
        r: assemble_r_from(&s, &mth, &(0..n).map(|i| if i < half { 1.0 } else { -1.0 }).collect::<Vec<_>>())?,
        d_h,
        d_g,
        k: None,
        internals: CongruenceInternals {
            m,
            s,
            a: Some(a),
            b: Some(b),
            re_n: Some(re_n),
            im_n: Some(im_n),
            takagi_residual: Some(factor.residual()),
            takagi_n: Some(factor.n),
        },
    })
}
