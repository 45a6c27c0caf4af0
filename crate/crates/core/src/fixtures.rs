//! Ready-made metrics, structures and Lagrangians with known properties.
//! Shared by the test suites, the command-line tool and the browser demo.

use nalgebra::DMatrix;
use rand::Rng;

use crate::antikahler::{self, AntiKahlerError, HolomorphicMetricField};
use crate::dsl::ChartSpec;
use crate::matrix::SymMatrix;
use crate::product::{self, ProductError, ProductSpec};
use crate::roots::LagrangianSpec;
use crate::tensor::{KField, MetricField, TensorError};

/// Round sphere `S^m` of radius `r` in hyperspherical angles
/// `(θ1, …, θ_{m−1}, φ)`, with coordinate names suffixed by `tag`.
/// `Ric = (m − 1)/r² · g`.
pub fn sphere(m: usize, radius: f64, tag: &str) -> Result<MetricField, TensorError> {
    if m < 2 {
        return Err(TensorError::Invalid("sphere needs dimension at least 2".into()));
    }
    let mut names: Vec<String> = (1..m).map(|i| format!("th{i}{tag}")).collect();
    names.push(format!("ph{tag}"));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut domain = vec![(0.3, 2.8); m - 1];
    domain.push((0.0, 6.0));
    let chart = ChartSpec::new(format!("S{m}{tag}"), &refs)?.with_domain(domain)?;
    let r2 = radius * radius;
    let mut diag = Vec::with_capacity(m);
    let mut warp = String::new();
    for name in names.iter().take(m - 1).map(Some).chain([None]) {
        diag.push(if warp.is_empty() { format!("{r2}") } else { format!("{r2}*{warp}") });
        if let Some(th) = name {
            if !warp.is_empty() {
                warp.push('*');
            }
            warp.push_str(&format!("sin({th})^2"));
        }
    }
    let refs: Vec<&str> = diag.iter().map(String::as_str).collect();
    MetricField::diagonal(chart, &refs)
}

/// Euclidean metric on `(−1, 1)^n` with the given coordinate names.
pub fn flat(coords: &[&str]) -> Result<MetricField, TensorError> {
    let chart = ChartSpec::new("flat", coords)?.with_domain(vec![(-1.0, 1.0); coords.len()])?;
    MetricField::diagonal(chart, &vec!["1"; coords.len()])
}

/// `S²(r1) × S²(r2)`.
pub fn sphere_product(r1: f64, r2: f64) -> Result<ProductSpec, ProductError> {
    ProductSpec::new(sphere(2, r1, "a")?, sphere(2, r2, "b")?)
}

/// `S²(1) × flat ℝ²`, not Einstein.
pub fn sphere_times_plane() -> Result<ProductSpec, ProductError> {
    ProductSpec::new(sphere(2, 1.0, "a")?, flat(&["u", "v"])?)
}

/// `dt² + e^{2t}(dx² + dy² + dz²)`: hyperbolic space with `Ric = −3g`.
pub fn hyperbolic_warped() -> Result<ProductSpec, ProductError> {
    let line = flat(&["t"])?;
    ProductSpec::new(line, flat(&["x", "y", "z"])?)?.with_warp_text("t")
}

/// `dt² + e^{2t}·(unit S²)`, not Einstein.
pub fn warped_sphere() -> Result<ProductSpec, ProductError> {
    ProductSpec::new(flat(&["t"])?, sphere(2, 1.0, "")?)?.with_warp_text("t")
}

/// The unit 2-sphere with its rotation by a right angle,
/// `J∂θ = ∂φ / sin θ` and `J∂φ = −sin θ ∂θ`: a Kähler pair.
pub fn kahler_sphere() -> Result<(MetricField, KField), TensorError> {
    let g = sphere(2, 1.0, "")?;
    let k = KField::parse(g.chart().clone(), &["0", "-sin(th1)", "1/sin(th1)", "0"], -1.0, 1.0)?;
    Ok((g, k))
}

/// Almost-complex structure on `ℝ⁴` whose entries shear with `x3`:
/// `K = [[0, B], [C, 0]]`, `B = [[1, x3], [0, 1]]`, `C = [[−1, x3], [0, −1]]`.
/// `K² = −I` everywhere but `K` is not integrable. It is not paired with a
/// metric, so `σ` is nominal.
pub fn shear_structure() -> Result<KField, TensorError> {
    let chart = ChartSpec::new("shear", &["x1", "x2", "x3", "x4"])?.with_domain(vec![(-1.0, 1.0); 4])?;
    #[rustfmt::skip]
    let texts = [
        "0", "0", "1", "x3",
        "0", "0", "0", "1",
        "-1", "x3", "0", "0",
        "0", "-1", "0", "0",
    ];
    KField::parse(chart, &texts, -1.0, 1.0)
}

/// Point at which [`shear_structure`]'s Nijenhuis tensor is evaluated.
pub const SHEAR_POINT: [f64; 4] = [0.1, -0.2, 0.3, 0.4];

/// `f(S) = (4S + 8)² = 16S² + 64S + 64` on a 4-manifold: `S = 2` is a simple
/// admissible root with `ε = 1/2`; `S = −2` is a root where `f′` vanishes.
pub fn product_lagrangian() -> LagrangianSpec {
    LagrangianSpec::new(vec![64.0, 64.0, 16.0], 4).expect("valid coefficients")
}

/// `f(S) = S² + 4` on a 4-manifold: `φ(S) = S² − 4`, and `S = −2` is
/// admissible with `ε = −1/2`.
pub fn complex_lagrangian() -> LagrangianSpec {
    LagrangianSpec::new(vec![4.0, 0.0, 1.0], 4).expect("valid coefficients")
}

/// `S²(1) × S²(1)` with `P = diag(−I, I)`; `Ric = g`.
pub fn sphere_product_palatini() -> Result<(MetricField, KField, LagrangianSpec, f64), ProductError> {
    let (g, p) = product::build_product(&sphere_product(1.0, 1.0)?)?;
    Ok((g, p, product_lagrangian(), 2.0))
}

/// The realified complex 2-sphere with its `J`; `Ric = g` already.
pub fn anti_kahler_palatini() -> Result<(MetricField, KField, LagrangianSpec, f64), AntiKahlerError> {
    let real = antikahler::realify_unchecked(&antikahler::complex_sphere_metric(2)?)?;
    Ok((real.metric, real.j, complex_lagrangian(), -2.0))
}

/// Three polynomial holomorphic metrics, `m = 1, 2, 3`.
pub fn polynomial_holomorphic() -> Result<Vec<HolomorphicMetricField>, AntiKahlerError> {
    Ok(vec![
        HolomorphicMetricField::parse(&["z1"], &["1 + z1^2"])?.with_sampling(0.5, None),
        HolomorphicMetricField::parse(&["z1", "z2"], &["1 + z1*z2", "z1^2", "z1^2", "2 + z2^3"])?
            .with_sampling(0.5, None),
        HolomorphicMetricField::parse(
            &["z1", "z2", "z3"],
            &["1", "z1*z3", "0", "z1*z3", "1 + z2^2", "z3", "0", "z3", "1 + z1"],
        )?
        .with_sampling(0.4, None),
    ])
}

/// A metric with a real-part contamination `x1 = (z1 + z̄1)/2`; it realifies
/// to an anti-Hermitian metric whose `J` is not parallel.
pub fn non_holomorphic_control() -> Result<HolomorphicMetricField, AntiKahlerError> {
    Ok(HolomorphicMetricField::parse(&["z1", "z2"], &["1 + ((z1 + conj(z1))/2)^2", "z2", "z2", "1 + z1^2"])?
        .with_sampling(0.5, None))
}

/// The flat metric `I₄` with the canonical `J`: Hermitian rather than
/// anti-Hermitian, `g(JX, JY) = +g(X, Y)`.
pub fn hermitian_control() -> Result<(MetricField, KField), TensorError> {
    let g = flat(&["a", "b", "c", "d"])?;
    let mut j = vec![0.0; 16];
    for a in 0..2 {
        j[(2 + a) * 4 + a] = 1.0;
        j[a * 4 + 2 + a] = -1.0;
    }
    let k = KField::constant(g.chart().clone(), &j, -1.0, 1.0)?;
    Ok((g, k))
}

/// `h = RᵗD_hR`, `g = RᵗD_gR` with known `R` and canonical blocks.
#[derive(Clone, Debug)]
pub struct RandomPair {
    pub h: SymMatrix,
    pub g: SymMatrix,
    pub r: DMatrix<f64>,
    pub d_h: DMatrix<f64>,
    pub d_g: DMatrix<f64>,
    /// Number of `−1` eigenvalues of `h⁻¹g` (product case).
    pub k: Option<usize>,
}

/// Random `n × n` matrix `U·diag(s)·V` with orthogonal `U`, `V` and
/// singular values log-uniform in `[1, cond]`, the extremes included.
pub fn random_conditioned(rng: &mut impl Rng, n: usize, cond: f64) -> DMatrix<f64> {
    let mut orth = || {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        a.qr().q()
    };
    let (u, v) = (orth(), orth());
    let mut s: Vec<f64> = (0..n).map(|_| cond.powf(rng.gen::<f64>())).collect();
    s[0] = 1.0;
    if n > 1 {
        s[n - 1] = cond;
    }
    u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s)) * v
}

/// A product-case pair with random signature and random `k`, transported by
/// a matrix of condition number `cond`.
pub fn random_product_pair(rng: &mut impl Rng, n: usize, cond: f64) -> RandomPair {
    let k = rng.gen_range(0..=n);
    let d_h = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }));
    let p = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| if i < k { -1.0 } else { 1.0 }));
    let d_g = &d_h * p;
    transported(random_conditioned(rng, n, cond), d_h, d_g, Some(k))
}

/// A complex-case pair `(diag(I, −I), antidiag(I, I))` transported by a
/// matrix of condition number `cond`; `n` must be even.
pub fn random_complex_pair(rng: &mut impl Rng, n: usize, cond: f64) -> RandomPair {
    let m = n / 2;
    let d_h = DMatrix::from_fn(n, n, |i, j| match (i == j, i < m) {
        (true, true) => 1.0,
        (true, false) => -1.0,
        _ => 0.0,
    });
    let d_g = DMatrix::from_fn(n, n, |i, j| if i + m == j || j + m == i { 1.0 } else { 0.0 });
    transported(random_conditioned(rng, n, cond), d_h, d_g, None)
}

fn transported(r: DMatrix<f64>, d_h: DMatrix<f64>, d_g: DMatrix<f64>, k: Option<usize>) -> RandomPair {
    let sym = |d: &DMatrix<f64>| {
        let a = r.transpose() * d * &r;
        SymMatrix::new((&a + a.transpose()) * 0.5).expect("symmetric by construction")
    };
    RandomPair { h: sym(&d_h), g: sym(&d_g), r, d_h, d_g, k }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_components() {
        let s3 = sphere(3, 2.0, "").unwrap();
        let v = s3.values(&[0.5, 1.0, 0.2]).unwrap();
        let (a, b) = (0.5f64.sin().powi(2), 1.0f64.sin().powi(2));
        assert_eq!(v[0], 4.0);
        assert!((v[4] - 4.0 * a).abs() < 1e-15);
        assert!((v[8] - 4.0 * a * b).abs() < 1e-15);
    }

    #[test]
    fn shear_squares_to_minus_identity() {
        let k = shear_structure().unwrap();
        for s in [-0.7, 0.0, 0.9] {
            let kv: Vec<f64> = k.jets(&[0.0, 0.0, s, 0.0]).unwrap().iter().map(|j| j.value).collect();
            let sq = crate::linalg::matmul(&kv, &kv, 4);
            for (i, x) in sq.iter().enumerate() {
                assert_eq!(*x, if i % 5 == 0 { -1.0 } else { 0.0 });
            }
        }
    }
}
