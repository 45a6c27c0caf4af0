//! Holomorphic Riemannian metrics and their real parts.
//!
//! A holomorphic metric `g_ab(z) dz^a dz^b` on `ℂ^m` has the real part
//! `ds² = 2 Re(g_ab dz^a dz^b)`. With `z = x + iy`, `A = Re g_ab` and
//! `B = Im g_ab`, the real components in the ordering `(x¹..x^m, y¹..y^m)`
//! are `2·[[A, −B], [−B, −A]]`, the complex structure is `J∂x = ∂y`,
//! `J∂y = −∂x`, and `g(JX, JY) = −g(X, Y)`.
//!
//! Christoffel symbols are taken in the coordinate frame `∂/∂z^a`. The frame
//! `Z_a = ∂x_a − i∂y_a = 2∂/∂z^a` carries symbols twice as large; that factor
//! only appears in [`mixed_christoffel_check`].

use num_complex::Complex64;
use thiserror::Error;

use crate::dsl::{ChartSpec, DslError, Expr, Func, Jet2, ScalarExpr};
use crate::linalg;
use crate::tensor::{einstein_residual, EinsteinFit, Geometry, KField, MetricField, SamplePlan, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AntiKahlerError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error("metric is not holomorphic: max |∂g/∂z̄| = {residual:e}")]
    NotHolomorphic { residual: f64 },
    #[error("complex metric is degenerate at z = {point:?}")]
    Degenerate { point: Vec<Complex64> },
    #[error("J² ≠ −I (residual {residual:e})")]
    NotComplexStructure { residual: f64 },
    #[error("{0}")]
    Invalid(String),
}

/// A symmetric `m × m` matrix of expressions in complex coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct HolomorphicMetricField {
    coords: Vec<String>,
    comps: Vec<ScalarExpr>,
    /// Sampling box for every real coordinate.
    domain: Vec<(f64, f64)>,
    /// Optional bound on `|z·z|` for sampling.
    zz_bound: Option<f64>,
}

fn real_names(coords: &[String]) -> Vec<String> {
    let split = |prefix: &str, c: &String| match c.strip_prefix('z') {
        Some(rest) if !rest.is_empty() => format!("{prefix}{rest}"),
        _ => format!("{prefix}_{c}"),
    };
    coords.iter().map(|c| split("x", c)).chain(coords.iter().map(|c| split("y", c))).collect()
}

impl HolomorphicMetricField {
    pub fn new(coords: &[&str], comps: Vec<ScalarExpr>) -> Result<Self, AntiKahlerError> {
        let chart = ChartSpec::new("holomorphic", coords)?;
        let m = coords.len();
        if comps.len() != m * m {
            return Err(TensorError::Shape { expected: m * m, got: comps.len() }.into());
        }
        let names: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        ChartSpec::new("real", &real_names(&names).iter().map(String::as_str).collect::<Vec<_>>())?;
        for a in 0..m {
            for b in a + 1..m {
                if comps[a * m + b].to_string() != comps[b * m + a].to_string() {
                    return Err(AntiKahlerError::Invalid(format!("component ({a}, {b}) differs from ({b}, {a})")));
                }
            }
        }
        Ok(Self { coords: chart.coords, comps, domain: vec![(-0.5, 0.5); 2 * m], zz_bound: None })
    }

    pub fn parse(coords: &[&str], texts: &[&str]) -> Result<Self, AntiKahlerError> {
        let names: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        let comps = texts.iter().map(|t| ScalarExpr::parse(t, &names)).collect::<Result<Vec<_>, _>>()?;
        Self::new(coords, comps)
    }

    /// Sets the sampling box (shared by every real coordinate) and an
    /// optional bound on `|z·z|`.
    pub fn with_sampling(mut self, half_width: f64, zz_bound: Option<f64>) -> Self {
        self.domain = vec![(-half_width, half_width); 2 * self.m()];
        self.zz_bound = zz_bound;
        self
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Result<Self, AntiKahlerError> {
        if domain.len() != 2 * self.m() {
            return Err(AntiKahlerError::Invalid(format!("need {} sampling intervals", 2 * self.m())));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.comps
    }

    pub fn real_chart(&self) -> ChartSpec {
        let names = real_names(&self.coords);
        ChartSpec { name: "realified".into(), coords: names, domain: Some(self.domain.clone()) }
    }

    /// `(x, y) ↦ z = x + iy`.
    pub fn z_of(&self, real: &[f64]) -> Vec<Complex64> {
        let m = self.m();
        (0..m).map(|a| Complex64::new(real[a], real[m + a])).collect()
    }

    /// Low-discrepancy points on the realified chart, honouring the
    /// `|z·z|` bound.
    pub fn sample_plan(&self, count: usize, seed: u64) -> Result<SamplePlan, TensorError> {
        let bound = self.zz_bound;
        let m = self.m();
        SamplePlan::halton_filtered(&self.real_chart(), count, seed, |p| match bound {
            Some(b) => {
                let zz: Complex64 = (0..m).map(|a| Complex64::new(p[a], p[m + a]).powi(2)).sum();
                zz.norm() <= b
            }
            None => true,
        })
    }

    pub fn jets(&self, z: &[Complex64]) -> Result<Vec<Jet2<Complex64>>, AntiKahlerError> {
        Ok(self.comps.iter().map(|c| c.eval_holomorphic(z)).collect::<Result<Vec<_>, _>>()?)
    }

    /// Each component as an expression in the real coordinates, complex valued.
    fn substituted(&self) -> Vec<ScalarExpr> {
        let m = self.m();
        let names = real_names(&self.coords);
        self.comps
            .iter()
            .map(|c| {
                let e =
                    c.expr.substitute(&|a| Expr::add(Expr::Coord(a), Expr::mul(Expr::ImagUnit, Expr::Coord(m + a))));
                ScalarExpr::from_expr(e, &names)
            })
            .collect()
    }

    /// `ḡ(z) = conj(g(z̄))`, again holomorphic.
    pub fn conjugate(&self) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let e = Expr::call(Func::Conj, c.expr.substitute(&|a| Expr::call(Func::Conj, Expr::Coord(a))));
                ScalarExpr::from_expr(e, &self.coords)
            })
            .collect();
        Self { comps, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolomorphyReport {
    /// `max |∂g_ab/∂z̄^c|` from real-coordinate derivatives.
    pub dbar: f64,
    /// `max |∂g_ab/∂z^c − (holomorphic derivative)|`; `None` when the
    /// expressions use non-analytic functions.
    pub cauchy_riemann: Option<f64>,
}

impl HolomorphyReport {
    pub fn max(&self) -> f64 {
        self.dbar.max(self.cauchy_riemann.unwrap_or(0.0))
    }
}

pub fn holomorphy_check(g: &HolomorphicMetricField, plan: &SamplePlan) -> Result<HolomorphyReport, AntiKahlerError> {
    let m = g.m();
    let subs = g.substituted();
    let analytic = g.comps.iter().all(|c| c.expr.is_analytic());
    let mut report = HolomorphyReport { dbar: 0.0, cauchy_riemann: analytic.then_some(0.0) };
    let i = Complex64::new(0.0, 1.0);
    for p in plan.points() {
        let z = g.z_of(p);
        for (k, s) in subs.iter().enumerate() {
            let jet = s.eval_complex_valued(p)?;
            let holo = if analytic { Some(g.comps[k].eval_holomorphic(&z)?) } else { None };
            for c in 0..m {
                let (dx, dy) = (jet.d(c), jet.d(m + c));
                report.dbar = report.dbar.max(((dx + i * dy) * 0.5).norm());
                if let (Some(h), Some(cr)) = (&holo, report.cauchy_riemann.as_mut()) {
                    *cr = cr.max(((dx - i * dy) * 0.5 - h.d(c)).norm());
                }
            }
        }
    }
    Ok(report)
}

/// The real part of a holomorphic metric together with its complex structure.
#[derive(Clone, Debug)]
pub struct RealifiedMetric {
    pub metric: MetricField,
    pub j: KField,
}

/// Builds `2·[[A, −B], [−B, −A]]` and `J` without checking holomorphy.
pub fn realify_unchecked(g: &HolomorphicMetricField) -> Result<RealifiedMetric, AntiKahlerError> {
    let m = g.m();
    let n = 2 * m;
    let chart = g.real_chart();
    let names = chart.coords.clone();
    let subs = g.substituted();
    let part = |k: usize, f: Func, sign: f64| -> ScalarExpr {
        let e = match (&g.comps[k].expr, f) {
            (Expr::Num(x), Func::Re) => Expr::Num(2.0 * sign * x),
            (Expr::Num(_), Func::Im) => Expr::Num(0.0),
            _ => Expr::times(Expr::Num(2.0 * sign), Expr::call(f, subs[k].expr.clone())),
        };
        ScalarExpr::from_expr(e, &names)
    };
    let mut comps = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let (a, b) = (r % m, c % m);
            let k = a * m + b;
            comps.push(match (r < m, c < m) {
                (true, true) => part(k, Func::Re, 1.0),
                (false, false) => part(k, Func::Re, -1.0),
                _ => part(k, Func::Im, -1.0),
            });
        }
    }
    let metric = MetricField::new(chart.clone(), comps)?;
    let mut jm = vec![0.0; n * n];
    for a in 0..m {
        jm[(m + a) * n + a] = 1.0;
        jm[a * n + m + a] = -1.0;
    }
    let j = KField::constant(chart, &jm, -1.0, -1.0)?;
    Ok(RealifiedMetric { metric, j })
}

/// Checks holomorphy on `plan` to `tol`, then realifies.
pub fn realify(g: &HolomorphicMetricField, plan: &SamplePlan, tol: f64) -> Result<RealifiedMetric, AntiKahlerError> {
    let h = holomorphy_check(g, plan)?;
    if h.max() > tol {
        return Err(AntiKahlerError::NotHolomorphic { residual: h.max() });
    }
    realify_unchecked(g)
}

fn complex_geometry(g: &HolomorphicMetricField, z: &[Complex64]) -> Result<Geometry<Complex64>, AntiKahlerError> {
    let jets = g.jets(z)?;
    let values: Vec<Complex64> = jets.iter().map(|j| j.value).collect();
    let scale = linalg::norm(&values).powi(g.m() as i32);
    let geo = Geometry::from_jets(&jets, g.m()).ok_or(AntiKahlerError::Degenerate { point: z.to_vec() })?;
    if geo.det.norm() <= 1e-14 * scale {
        return Err(AntiKahlerError::Degenerate { point: z.to_vec() });
    }
    Ok(geo)
}

/// `Γ^c_ab` in the holomorphic coordinate frame, laid out `[c][a][b]`.
pub fn complex_christoffel(g: &HolomorphicMetricField, z: &[Complex64]) -> Result<Vec<Complex64>, AntiKahlerError> {
    Ok(complex_geometry(g, z)?.gamma)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameReport {
    /// Largest mixed-type symbol of the realified connection in the
    /// `Z, Z̄` frame, relative to `1 + ‖Γ‖`.
    pub mixed: f64,
    /// `max |Γ^{Z_c}_{Z_a Z_b} − 2Γ^c_ab|` and its conjugate counterpart.
    pub frame_gap: f64,
}

/// Re-expresses the realified Levi-Civita connection in the complex frame
/// and compares it with the holomorphic symbols.
pub fn mixed_christoffel_check(g: &HolomorphicMetricField, plan: &SamplePlan) -> Result<FrameReport, AntiKahlerError> {
    let m = g.m();
    let n = 2 * m;
    let real = realify_unchecked(g)?;
    let i = Complex64::new(0.0, 1.0);
    // basis[A] for A < m is Z_A, for A ≥ m it is Z̄_{A−m}
    let basis: Vec<Vec<Complex64>> = (0..n)
        .map(|k| {
            let (a, conj) = (k % m, k >= m);
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[a] = Complex64::new(1.0, 0.0);
            v[m + a] = if conj { i } else { -i };
            v
        })
        .collect();
    let mut report = FrameReport { mixed: 0.0, frame_gap: 0.0 };
    for p in plan.points() {
        let geo = real.metric.geometry(p)?;
        let holo = complex_christoffel(g, &g.z_of(p))?;
        let scale = 1.0 + linalg::norm(&geo.gamma);
        for ka in 0..n {
            for kb in 0..n {
                let mut w = vec![Complex64::new(0.0, 0.0); n];
                for (l, wl) in w.iter_mut().enumerate() {
                    for mu in 0..n {
                        for nu in 0..n {
                            *wl += basis[ka][mu] * basis[kb][nu] * geo.gamma(l, mu, nu);
                        }
                    }
                }
                for c in 0..m {
                    let on_z = (w[c] + i * w[m + c]) * 0.5;
                    let on_zbar = (w[c] - i * w[m + c]) * 0.5;
                    let (a, b) = (ka % m, kb % m);
                    let expected = 2.0 * holo[(c * m + a) * m + b];
                    match (ka < m, kb < m) {
                        (true, true) => {
                            report.frame_gap = report.frame_gap.max((on_z - expected).norm());
                            report.mixed = report.mixed.max(on_zbar.norm() / scale);
                        }
                        (false, false) => {
                            report.frame_gap = report.frame_gap.max((on_zbar - expected.conj()).norm());
                            report.mixed = report.mixed.max(on_z.norm() / scale);
                        }
                        _ => report.mixed = report.mixed.max(on_z.norm().max(on_zbar.norm()) / scale),
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexEinsteinReport {
    /// `Σ g^{ab}R_ab / (m·N)` from holomorphic calculus.
    pub gamma: Complex64,
    /// `max ‖R_ab − γ g_ab‖ / ‖g_ab‖`.
    pub max_residual: f64,
    /// The same fit on the realified metric.
    pub real: EinsteinFit,
    /// `|γ − γ_real|`.
    pub route_gap: f64,
}

/// Fits `R_ab = γ g_ab` in holomorphic coordinates and, independently, the
/// real Einstein equation of the realified metric.
pub fn complex_einstein_check(
    g: &HolomorphicMetricField,
    plan: &SamplePlan,
) -> Result<ComplexEinsteinReport, AntiKahlerError> {
    let m = g.m();
    let geos = plan.points().iter().map(|p| complex_geometry(g, &g.z_of(p))).collect::<Result<Vec<_>, _>>()?;
    if geos.is_empty() {
        return Err(TensorError::Plan("no sample points".into()).into());
    }
    let (mut re, mut im) = (crate::scalar::CompensatedSum::default(), crate::scalar::CompensatedSum::default());
    for geo in &geos {
        let s = geo.scalar_curvature();
        re.add(s.re);
        im.add(s.im);
    }
    let gamma = Complex64::new(re.total(), im.total()) / (m * geos.len()) as f64;
    let max_residual = geos
        .iter()
        .map(|geo| {
            let d: Vec<Complex64> = geo.ricci.iter().zip(&geo.g).map(|(r, g)| r - gamma * g).collect();
            linalg::norm(&d) / linalg::norm(&geo.g)
        })
        .fold(0.0, f64::max);
    let real = einstein_residual(&realify_unchecked(g)?.metric, plan)?;
    let route_gap = (gamma - real.gamma).norm();
    Ok(ComplexEinsteinReport { gamma, max_residual, real, route_gap })
}

/// `g_ab = δ_ab + z_a z_b / (1 − z·z)`, sampled where `|z·z| ≤ 0.5`.
pub fn complex_sphere_metric(m: usize) -> Result<HolomorphicMetricField, AntiKahlerError> {
    if m == 0 {
        return Err(AntiKahlerError::Invalid("complex dimension must be positive".into()));
    }
    let names: Vec<String> = (1..=m).map(|a| format!("z{a}")).collect();
    let zz = names.iter().map(|z| format!("{z}^2")).collect::<Vec<_>>().join(" + ");
    let mut texts = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            let (lo, hi) = (a.min(b), a.max(b));
            let delta = if a == b { "1 + " } else { "" };
            texts.push(format!("{delta}{}*{}/(1 - ({zz}))", names[lo], names[hi]));
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let text_refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    Ok(HolomorphicMetricField::parse(&refs, &text_refs)?.with_sampling(0.5, Some(0.5)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockReport {
    /// `max ‖g(Z_a, Z̄_b)‖ / ‖g‖`.
    pub metric_mixed: f64,
    /// `max ‖Ric(Z_a, Z̄_b)‖ / max(‖Ric‖, 1)`.
    pub ricci_mixed: f64,
}

/// Mixed `(a, b̄)` blocks of `g` and its Ricci tensor in the frame
/// `Z_a = X_a − iJX_a`, `X_a` the first `n/2` coordinate fields.
pub fn antihermitian_block_check(
    g: &MetricField,
    j: &KField,
    plan: &SamplePlan,
) -> Result<BlockReport, AntiKahlerError> {
    let n = g.dim();
    if n % 2 == 1 {
        return Err(AntiKahlerError::Invalid(format!("odd dimension {n}")));
    }
    let m = n / 2;
    let i = Complex64::new(0.0, 1.0);
    let mut report = BlockReport { metric_mixed: 0.0, ricci_mixed: 0.0 };
    for p in plan.points() {
        let jv: Vec<f64> = j.jets(p)?.iter().map(|x| x.value).collect();
        let j2 = linalg::matmul(&jv, &jv, n);
        let dev: Vec<f64> = j2.iter().zip(linalg::identity::<f64>(n)).map(|(a, b)| a + b).collect();
        let residual = linalg::norm(&dev);
        if residual > 1e-9 {
            return Err(AntiKahlerError::NotComplexStructure { residual });
        }
        let z: Vec<Vec<Complex64>> = (0..m)
            .map(|a| (0..n).map(|r| Complex64::new(if r == a { 1.0 } else { 0.0 }, 0.0) - i * jv[r * n + a]).collect())
            .collect();
        let geo = g.geometry(p)?;
        let mixed = |t: &[f64]| -> f64 {
            let mut s = 0.0;
            for za in &z {
                for zb in &z {
                    let mut v = Complex64::new(0.0, 0.0);
                    for r in 0..n {
                        for c in 0..n {
                            v += za[r] * t[r * n + c] * zb[c].conj();
                        }
                    }
                    s += v.norm_sqr();
                }
            }
            s.sqrt()
        };
        report.metric_mixed = report.metric_mixed.max(mixed(&geo.g) / linalg::norm(&geo.g));
        report.ricci_mixed = report.ricci_mixed.max(mixed(&geo.ricci) / linalg::norm(&geo.ricci).max(1.0));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_metrics_realify_by_hand() {
        let one = HolomorphicMetricField::parse(&["z"], &["1"]).unwrap();
        let r = realify_unchecked(&one).unwrap();
        assert_eq!(r.metric.values(&[0.1, 0.2]).unwrap(), vec![2.0, 0.0, 0.0, -2.0]);
        let i = HolomorphicMetricField::parse(&["z"], &["i"]).unwrap();
        let r = realify_unchecked(&i).unwrap();
        assert_eq!(r.metric.values(&[0.1, 0.2]).unwrap(), vec![0.0, -2.0, -2.0, 0.0]);
    }

    #[test]
    fn realification_matches_direct_expansion() {
        // 2 Re(g (dx + i dy)²) with g = a + ib gives 2a dx² − 4b dx dy − 2a dy².
        let g = HolomorphicMetricField::parse(&["z"], &["z^2 + 1"]).unwrap();
        let r = realify_unchecked(&g).unwrap();
        let (x, y) = (0.3, -0.4);
        let w = c(x, y) * c(x, y) + 1.0;
        let v = r.metric.values(&[x, y]).unwrap();
        assert!((v[0] - 2.0 * w.re).abs() < 1e-15);
        assert!((v[1] + 2.0 * w.im).abs() < 1e-15);
        assert!((v[3] + 2.0 * w.re).abs() < 1e-15);
    }

    #[test]
    fn holomorphy_detects_conjugate_dependence() {
        let plan = SamplePlan::explicit(vec![vec![0.4, 0.2], vec![-0.6, 0.1]]).unwrap();
        let good = HolomorphicMetricField::parse(&["z"], &["z^2"]).unwrap();
        let h = holomorphy_check(&good, &plan).unwrap();
        assert!(h.max() < 1e-14);
        let bad = HolomorphicMetricField::parse(&["z"], &["((z + conj(z))/2)^2"]).unwrap();
        let h = holomorphy_check(&bad, &plan).unwrap();
        assert!(h.dbar >= 0.1);
        assert!(h.cauchy_riemann.is_none());
        assert!(matches!(realify(&bad, &plan, 1e-9), Err(AntiKahlerError::NotHolomorphic { .. })));
    }

    #[test]
    fn christoffel_of_rational_metric() {
        let g = HolomorphicMetricField::parse(&["z"], &["1/(1 - z^2)"]).unwrap();
        let gam = complex_christoffel(&g, &[c(0.3, 0.0)]).unwrap();
        assert!((gam[0] - c(0.3 / 0.91, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complex_sphere_at_origin() {
        let g = complex_sphere_metric(2).unwrap();
        let z = [c(0.0, 0.0), c(0.0, 0.0)];
        let vals: Vec<Complex64> = g.jets(&z).unwrap().iter().map(|j| j.value).collect();
        assert_eq!(vals, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(complex_christoffel(&g, &z).unwrap().iter().all(|x| x.norm() < 1e-15));
        let r = realify_unchecked(&g).unwrap();
        let v = r.metric.values(&[0.0; 4]).unwrap();
        let expected = [2.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0, -2.0];
        assert_eq!(v, expected);
    }

    #[test]
    fn complex_sphere_sample_point() {
        let g = complex_sphere_metric(2).unwrap();
        let z = [c(0.1, 0.0), c(0.0, 0.2)];
        let v: Vec<Complex64> = g.jets(&z).unwrap().iter().map(|j| j.value).collect();
        // z·z = 0.01 − 0.04 = −0.03
        let d = 1.0 + 0.03;
        assert!((v[0] - c(1.0 + 0.01 / d, 0.0)).norm() < 1e-15);
        assert!((v[1] - c(0.0, 0.02 / d)).norm() < 1e-15);
        assert_eq!(v[1], v[2]);
        assert!((v[3] - c(1.0 - 0.04 / d, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hermitian_control_has_mixed_block() {
        let chart = ChartSpec::new("e", &["a", "b", "c", "d"]).unwrap();
        let g = MetricField::diagonal(chart.clone(), &["1", "1", "1", "1"]).unwrap();
        let mut jm = vec![0.0; 16];
        jm[2 * 4] = 1.0;
        jm[3 * 4 + 1] = 1.0;
        jm[2] = -1.0;
        jm[4 + 3] = -1.0;
        let j = KField::constant(chart, &jm, -1.0, 1.0).unwrap();
        let plan = SamplePlan::explicit(vec![vec![0.0; 4]]).unwrap();
        let r = antihermitian_block_check(&g, &j, &plan).unwrap();
        assert!(r.metric_mixed >= 0.1);
        assert_eq!(r.ricci_mixed, 0.0);
    }

    #[test]
    fn complex_sphere_routes_agree() {
        let g = complex_sphere_metric(2).unwrap();
        let plan = g.sample_plan(8, 3).unwrap();
        let r = complex_einstein_check(&g, &plan).unwrap();
        assert!((r.gamma - c(1.0, 0.0)).norm() < 1e-9, "{:?}", r.gamma);
        assert!(r.max_residual < 1e-9);
        assert!(r.route_gap < 1e-9, "{r:?}");
        let f = mixed_christoffel_check(&g, &plan).unwrap();
        assert!(f.mixed < 1e-10 && f.frame_gap < 1e-10, "{f:?}");
        let real = realify(&g, &plan, 1e-9).unwrap();
        let b = antihermitian_block_check(&real.metric, &real.j, &plan).unwrap();
        assert!(b.metric_mixed < 1e-12 && b.ricci_mixed < 1e-9, "{b:?}");
    }

    #[test]
    fn conjugation_is_reflection_in_y() {
        let g = HolomorphicMetricField::parse(&["z1", "z2"], &["1 + i*z1*z2", "z1^2", "z1^2", "exp(z2)"]).unwrap();
        let a = realify_unchecked(&g.conjugate()).unwrap();
        let b = realify_unchecked(&g).unwrap();
        let p = [0.2, -0.3, 0.4, 0.1];
        let q = [0.2, -0.3, -0.4, -0.1];
        let (va, vb) = (a.metric.values(&p).unwrap(), b.metric.values(&q).unwrap());
        for r in 0..4 {
            for s in 0..4 {
                let flip = if (r < 2) == (s < 2) { 1.0 } else { -1.0 };
                assert!((va[r * 4 + s] - flip * vb[r * 4 + s]).abs() < 1e-12);
            }
        }
    }
}
