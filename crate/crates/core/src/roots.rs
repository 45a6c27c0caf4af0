//! Real roots of `φ(S) = f′(S)·S − (n/4)·f(S)` for polynomial `f`, and the
//! twin-structure constant `ε = c/n` attached to each root.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("f is the zero polynomial")]
    ZeroPolynomial,
    #[error("dimension must be at least 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("f′({c}) = {f_prime:e} vanishes; the root is degenerate")]
    DegenerateRoot { c: f64, f_prime: f64 },
    #[error("S = {c} is not a root: φ(c) = {residual:e}")]
    NotARoot { c: f64, residual: f64 },
    #[error("c/n = {by_trace} and f(c)/(4f′(c)) = {by_ratio} disagree")]
    Inconsistent { by_trace: f64, by_ratio: f64 },
}

/// `L = f(S)·√|det h|` on an `n`-manifold; `f` in ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianSpec {
    coeffs: Vec<f64>,
    n: usize,
}

impl LagrangianSpec {
    pub fn new(coeffs: Vec<f64>, n: usize) -> Result<Self, RootError> {
        if n < 3 {
            return Err(RootError::DimensionTooSmall(n));
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(RootError::NonFinite { index });
        }
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(RootError::ZeroPolynomial);
        }
        Ok(Self { coeffs, n })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self, s: f64) -> f64 {
        horner(&self.coeffs, s)
    }

    pub fn f_prime(&self, s: f64) -> f64 {
        horner(&derivative(&self.coeffs), s)
    }

    /// Coefficients of `φ`: `φ_k = (k − n/4)·a_k`.
    pub fn phi_coeffs(&self) -> Vec<f64> {
        let q = self.n as f64 / 4.0;
        self.coeffs.iter().enumerate().map(|(k, &a)| (k as f64 - q) * a).collect()
    }

    pub fn phi(&self, s: f64) -> f64 {
        horner(&self.phi_coeffs(), s)
    }

    fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootEntry {
    pub c: f64,
    pub multiplicity: usize,
    pub f_prime_at_c: f64,
    pub epsilon: f64,
    /// Simple root with `f′(c) ≠ 0`.
    pub admissible: bool,
    /// `c = 0`, so `ε = 0`: an almost-tangent structure the pipeline cannot use.
    pub almost_tangent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootReport {
    pub roots: Vec<RootEntry>,
    pub identically_degenerate: bool,
}

impl RootReport {
    pub fn admissible(&self) -> impl Iterator<Item = &RootEntry> {
        self.roots.iter().filter(|r| r.admissible && !r.almost_tangent)
    }
}

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn horner_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub(crate) fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

/// Drops leading coefficients that are negligible against the largest one.
fn trim(coeffs: &[f64]) -> Vec<f64> {
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut v = coeffs.to_vec();
    while let Some(&last) = v.last() {
        if last.abs() <= 1e-14 * max || last == 0.0 {
            v.pop();
        } else {
            break;
        }
    }
    v
}

/// All complex roots by the Aberth–Ehrlich iteration, started on a circle
/// of the Cauchy radius.
fn all_roots(p: &[f64]) -> Vec<Complex64> {
    let d = p.len() - 1;
    if d == 0 {
        return vec![];
    }
    let lead = p[d];
    let radius = 1.0 + p[..d].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let dp = derivative(p);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..d {
            let val = horner_complex(p, z[k]);
            if val.norm() == 0.0 {
                continue;
            }
            let ratio = val / horner_complex(&dp, z[k]);
            let repulsion: Complex64 = (0..d).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved <= 1e-15 {
            break;
        }
    }
    z
}

/// Newton steps on `p`, keeping the best iterate.
fn polish(p: &[f64], x0: f64) -> f64 {
    let dp = derivative(p);
    let mut x = x0;
    let mut best = (horner(p, x).abs(), x);
    for _ in 0..50 {
        let d = horner(&dp, x);
        if d == 0.0 {
            break;
        }
        let step = horner(p, x) / d;
        x -= step;
        let r = horner(p, x).abs();
        if r < best.0 {
            best = (r, x);
        }
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    best.1
}

/// Finds every real root of `φ` with multiplicity and classifies it.
///
/// Roots that coincide within `1e-5·(1 + |z|)` are merged
/// into one root whose size is the multiplicity; the merged value is then
/// polished by Newton's method on `φ^{(m−1)}`, which has a simple root there.
pub fn classify_roots(spec: &LagrangianSpec) -> RootReport {
    let phi_raw = spec.phi_coeffs();
    let scale = spec.norm();
    if phi_raw.iter().all(|c| c.abs() <= 1e-12 * scale) {
        return RootReport { roots: vec![], identically_degenerate: true };
    }
    let phi = trim(&phi_raw);
    let mut eig = all_roots(&phi);
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    let mut used = vec![false; eig.len()];
    for i in 0..eig.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut cluster = vec![eig[i]];
        for j in i + 1..eig.len() {
            if !used[j] && (eig[j] - eig[i]).norm() <= 1e-5 * (1.0 + eig[i].norm()) {
                used[j] = true;
                cluster.push(eig[j]);
            }
        }
        clusters.push(cluster);
    }

    let mut roots = Vec::new();
    for cluster in clusters {
        let m = cluster.len();
        let mean = cluster.iter().sum::<Complex64>() / m as f64;
        if mean.im.abs() > 1e-7 * (1.0 + mean.re.abs()) {
            continue;
        }
        let mut dm = phi.clone();
        for _ in 1..m {
            dm = derivative(&dm);
        }
        let c = polish(&dm, mean.re);
        // A polished value must still be a root of φ itself.
        let magnitude: f64 = phi.iter().enumerate().map(|(k, a)| a.abs() * c.abs().max(1.0).powi(k as i32)).sum();
        if horner_complex(&phi, Complex64::new(c, 0.0)).norm() > 1e-6 * magnitude.max(f64::MIN_POSITIVE) {
            continue;
        }
        let f_prime = spec.f_prime(c);
        let admissible = m == 1 && f_prime.abs() > 1e-10 * scale;
        roots.push(RootEntry {
            c,
            multiplicity: m,
            f_prime_at_c: f_prime,
            epsilon: c / spec.n as f64,
            admissible,
            almost_tangent: c == 0.0 || c.abs() <= 1e-14 * scale,
        });
    }
    roots.sort_by(|a, b| a.c.total_cmp(&b.c));
    RootReport { roots, identically_degenerate: false }
}

/// `ε = c/n`, cross-checked against the equivalent `f(c)/(4f′(c))`.
pub fn epsilon_of_root(c: f64, spec: &LagrangianSpec) -> Result<f64, RootError> {
    let scale = spec.norm();
    let f_prime = spec.f_prime(c);
    if f_prime.abs() <= 1e-10 * scale {
        return Err(RootError::DegenerateRoot { c, f_prime });
    }
    let phi = spec.phi_coeffs();
    let magnitude: f64 = phi.iter().enumerate().map(|(k, a)| a.abs() * c.abs().powi(k as i32)).sum();
    let residual = spec.phi(c);
    if residual.abs() > 1e-9 * magnitude.max(1.0) {
        return Err(RootError::NotARoot { c, residual });
    }
    let by_trace = c / spec.n as f64;
    let by_ratio = spec.f(c) / (4.0 * f_prime);
    if (by_trace - by_ratio).abs() > 1e-9 * by_trace.abs().max(by_ratio.abs()).max(1e-300) && by_trace != by_ratio {
        return Err(RootError::Inconsistent { by_trace, by_ratio });
    }
    Ok(by_trace)
}
