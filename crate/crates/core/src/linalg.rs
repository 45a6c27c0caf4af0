//! Small dense matrices over any [`Field`], stored row-major in `Vec`s.
//!
//! nalgebra covers the `f64` work; these helpers exist because the tensor
//! engine also runs on dual and complex scalars.

use crate::scalar::Field;

/// Inverse and determinant by Gauss–Jordan elimination with partial
/// pivoting on the primal magnitude. `None` when a pivot is exactly zero.
pub fn invert<S: Field>(a: &[S], n: usize) -> Option<(Vec<S>, S)> {
    let mut m = a.to_vec();
    let mut inv = identity::<S>(n);
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i * n + col].magnitude().total_cmp(&m[j * n + col].magnitude()))?;
        if m[pivot * n + col].magnitude() == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det = det * p;
        let r = S::one() / p;
        for k in 0..n {
            m[col * n + k] = m[col * n + k] * r;
            inv[col * n + k] = inv[col * n + k] * r;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[i * n + col];
            if f.magnitude() == 0.0 {
                continue;
            }
            for k in 0..n {
                m[i * n + k] = m[i * n + k] - f * m[col * n + k];
                inv[i * n + k] = inv[i * n + k] - f * inv[col * n + k];
            }
        }
    }
    Some((inv, det))
}

pub fn identity<S: Field>(n: usize) -> Vec<S> {
    (0..n * n).map(|k| if k / n == k % n { S::one() } else { S::zero() }).collect()
}

pub fn matmul<S: Field>(a: &[S], b: &[S], n: usize) -> Vec<S> {
    let mut c = vec![S::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] = c[i * n + j] + aik * b[k * n + j];
            }
        }
    }
    c
}

pub fn transpose<S: Field>(a: &[S], n: usize) -> Vec<S> {
    (0..n * n).map(|k| a[(k % n) * n + k / n]).collect()
}

/// Frobenius norm of the primal parts.
pub fn norm<S: Field>(a: &[S]) -> f64 {
    a.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt()
}

pub fn to_dmatrix(a: &[f64], n: usize) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(n, n, a)
}
