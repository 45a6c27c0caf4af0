//! K-structures paired with a metric: compatibility, the twin tensor,
//! `ψ = ∇h`, the Nijenhuis tensor and the curvature identities of
//! Kähler-like pairs (`∇K = 0`).

use super::{
    i3, i4, same_chart, EinsteinFit, Geometry, KField, MetricField, PointTensor, SamplePlan, TensorError, Variance,
};
use crate::dsl::{Expr, ScalarExpr};
use crate::linalg;
use crate::scalar::CompensatedSum;

/// `K` and its first derivatives at a point: `dk[a][m][v] = ∂_a K^m_v`.
#[derive(Clone, Debug)]
pub struct KPoint {
    pub n: usize,
    pub k: Vec<f64>,
    pub dk: Vec<f64>,
}

impl KPoint {
    pub fn at(k: &KField, point: &[f64]) -> Result<Self, TensorError> {
        let n = k.dim();
        let jets = k.jets(point)?;
        let mut dk = vec![0.0; n * n * n];
        for a in 0..n {
            for m in 0..n {
                for v in 0..n {
                    dk[i3(n, a, m, v)] = jets[m * n + v].d(a);
                }
            }
        }
        Ok(Self { n, k: jets.iter().map(|j| j.value).collect(), dk })
    }

    fn k(&self, m: usize, v: usize) -> f64 {
        self.k[m * self.n + v]
    }
}

/// `∇_a K^m_v = ∂_a K^m_v + Γ^m_ab K^b_v − Γ^b_av K^m_b`, laid out `[a][m][v]`.
pub fn nabla_k(geo: &Geometry<f64>, kp: &KPoint) -> Vec<f64> {
    let n = geo.n;
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for m in 0..n {
            for v in 0..n {
                let mut r = kp.dk[i3(n, a, m, v)];
                for b in 0..n {
                    r += geo.gamma(m, a, b) * kp.k(b, v) - geo.gamma(b, a, v) * kp.k(m, b);
                }
                out[i3(n, a, m, v)] = r;
            }
        }
    }
    out
}

fn nijenhuis_at(kp: &KPoint) -> Vec<f64> {
    let n = kp.n;
    let mut out = vec![0.0; n * n * n];
    for l in 0..n {
        for m in 0..n {
            for v in 0..n {
                let mut r = 0.0;
                for a in 0..n {
                    r += kp.k(a, m) * kp.dk[i3(n, a, l, v)] - kp.k(a, v) * kp.dk[i3(n, a, l, m)];
                    r -= kp.k(l, a) * (kp.dk[i3(n, m, a, v)] - kp.dk[i3(n, v, a, m)]);
                }
                out[i3(n, l, m, v)] = r;
            }
        }
    }
    out
}

/// `N(X,Y) = [KX,KY] − K[KX,Y] − K[X,KY] + ε[X,Y]` in coordinates,
/// `N^l_mv = K^a_m ∂_a K^l_v − K^a_v ∂_a K^l_m − K^l_a (∂_m K^a_v − ∂_v K^a_m)`.
/// The `ε` term drops out because coordinate fields commute.
pub fn nijenhuis(k: &KField, point: &[f64]) -> Result<PointTensor, TensorError> {
    let kp = KPoint::at(k, point)?;
    Ok(PointTensor::new(k.dim(), vec![Variance::Up, Variance::Down, Variance::Down], nijenhuis_at(&kp)))
}

/// `ψ_amv = g_bv (∇_a K)^b_m`, i.e. `ψ(X,Y,Z) = g((∇_X K)Y, Z) = (∇_X h)(Y,Z)`.
fn psi_at(geo: &Geometry<f64>, kp: &KPoint) -> Vec<f64> {
    let n = geo.n;
    let nk = nabla_k(geo, kp);
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for m in 0..n {
            for v in 0..n {
                out[i3(n, a, m, v)] = (0..n).map(|b| geo.g[b * n + v] * nk[i3(n, a, b, m)]).sum();
            }
        }
    }
    out
}

pub fn psi_tensor(g: &MetricField, k: &KField, point: &[f64]) -> Result<PointTensor, TensorError> {
    same_chart(g.chart(), k.chart())?;
    let geo = g.geometry(point)?;
    let kp = KPoint::at(k, point)?;
    Ok(PointTensor::new(g.dim(), vec![Variance::Down; 3], psi_at(&geo, &kp)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityReport {
    pub epsilon: f64,
    pub sigma: f64,
    /// `max ‖K² − εI‖ / √n`.
    pub square: f64,
    /// `max ‖KᵗgK − σg‖ / ‖g‖`.
    pub metric: f64,
}

impl CompatibilityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.square <= tol && self.metric <= tol
    }
}

pub fn check_k_compatibility(
    g: &MetricField,
    k: &KField,
    plan: &SamplePlan,
) -> Result<CompatibilityReport, TensorError> {
    same_chart(g.chart(), k.chart())?;
    let n = g.dim();
    let mut report = CompatibilityReport { epsilon: k.epsilon, sigma: k.sigma, square: 0.0, metric: 0.0 };
    for p in plan.points() {
        let gv = g.values(p)?;
        let kv: Vec<f64> = k.jets(p)?.iter().map(|j| j.value).collect();
        let k2 = linalg::matmul(&kv, &kv, n);
        let sq: Vec<f64> = k2.iter().zip(linalg::identity::<f64>(n)).map(|(a, b)| a - k.epsilon * b).collect();
        report.square = report.square.max(linalg::norm(&sq) / (n as f64).sqrt());
        let kgk = linalg::matmul(&linalg::matmul(&linalg::transpose(&kv, n), &gv, n), &kv, n);
        let dm: Vec<f64> = kgk.iter().zip(&gv).map(|(a, b)| a - k.sigma * b).collect();
        report.metric = report.metric.max(linalg::norm(&dm) / linalg::norm(&gv));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwinKind {
    /// `εσ = 1`: the twin is symmetric.
    Metric,
    /// `εσ = −1`: the twin is antisymmetric.
    TwoForm,
}

/// `h(X,Y) = g(KX,Y)`, componentwise `h_mv = K^b_m g_bv`.
#[derive(Clone, Debug)]
pub struct TwinField {
    pub kind: TwinKind,
    pub chart: crate::dsl::ChartSpec,
    pub components: Vec<ScalarExpr>,
}

impl TwinField {
    /// The twin as a metric; `None` for the two-form kind.
    pub fn as_metric(&self) -> Option<Result<MetricField, TensorError>> {
        (self.kind == TwinKind::Metric).then(|| MetricField::new(self.chart.clone(), self.components.clone()))
    }

    pub fn values(&self, point: &[f64]) -> Result<Vec<f64>, TensorError> {
        self.components.iter().map(|c| Ok(c.eval_real(point)?.value)).collect()
    }
}

pub fn twin_field(g: &MetricField, k: &KField, plan: &SamplePlan, tol: f64) -> Result<TwinField, TensorError> {
    let compat = check_k_compatibility(g, k, plan)?;
    if !compat.passes(tol) {
        return Err(TensorError::Compatibility { square: compat.square, metric: compat.metric });
    }
    let n = g.dim();
    let coords = &g.chart().coords;
    let mut components = Vec::with_capacity(n * n);
    for m in 0..n {
        for v in 0..n {
            let e = (0..n).fold(Expr::Num(0.0), |acc, b| {
                Expr::plus(acc, Expr::times(k.components()[b * n + m].expr.clone(), g.component(b, v).expr.clone()))
            });
            components.push(ScalarExpr::from_expr(e, coords));
        }
    }
    let kind = if k.epsilon * k.sigma > 0.0 { TwinKind::Metric } else { TwinKind::TwoForm };
    Ok(TwinField { kind, chart: g.chart().clone(), components })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiSymmetryReport {
    /// `max ‖ψ(X,Y,Z) + σψ(X,KY,KZ)‖ / max(1, ‖ψ‖)`.
    pub k_pair: f64,
    /// `max ‖ψ(X,Y,Z) − σεψ(X,Z,Y)‖ / max(1, ‖ψ‖)`.
    pub swap: f64,
    pub max_norm: f64,
}

pub fn psi_symmetry_check(g: &MetricField, k: &KField, plan: &SamplePlan) -> Result<PsiSymmetryReport, TensorError> {
    same_chart(g.chart(), k.chart())?;
    let n = g.dim();
    let (s, e) = (k.sigma, k.epsilon);
    let mut r = PsiSymmetryReport { k_pair: 0.0, swap: 0.0, max_norm: 0.0 };
    for p in plan.points() {
        let geo = g.geometry(p)?;
        let kp = KPoint::at(k, p)?;
        let psi = psi_at(&geo, &kp);
        let scale = linalg::norm(&psi).max(1.0);
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for a in 0..n {
            for m in 0..n {
                for v in 0..n {
                    let mut rot = 0.0;
                    for x in 0..n {
                        for y in 0..n {
                            rot += psi[i3(n, a, x, y)] * kp.k(x, m) * kp.k(y, v);
                        }
                    }
                    let here = psi[i3(n, a, m, v)];
                    d1 += (here + s * rot).powi(2);
                    d2 += (here - s * e * psi[i3(n, a, v, m)]).powi(2);
                }
            }
        }
        r.k_pair = r.k_pair.max(d1.sqrt() / scale);
        r.swap = r.swap.max(d2.sqrt() / scale);
        r.max_norm = r.max_norm.max(linalg::norm(&psi));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KahlerLikeReport {
    pub max_nabla_k: f64,
    pub max_nijenhuis: f64,
    /// `∇K = 0` within tolerance.
    pub passed: bool,
}

impl KahlerLikeReport {
    /// A parallel `K` must be integrable.
    pub fn consistent(&self, tol: f64) -> bool {
        !self.passed || self.max_nijenhuis <= tol
    }
}

pub fn kahler_like_check(
    g: &MetricField,
    k: &KField,
    plan: &SamplePlan,
    tol: f64,
) -> Result<KahlerLikeReport, TensorError> {
    same_chart(g.chart(), k.chart())?;
    let mut r = KahlerLikeReport { max_nabla_k: 0.0, max_nijenhuis: 0.0, passed: false };
    for p in plan.points() {
        let geo = g.geometry(p)?;
        let kp = KPoint::at(k, p)?;
        r.max_nabla_k = r.max_nabla_k.max(linalg::norm(&nabla_k(&geo, &kp)));
        r.max_nijenhuis = r.max_nijenhuis.max(linalg::norm(&nijenhuis_at(&kp)));
    }
    r.passed = r.max_nabla_k <= tol;
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureIdentityReport {
    /// `R(X,Y)∘K = K∘R(X,Y)`.
    pub commutation: f64,
    /// `R(KX,KY) = σR(X,Y)`.
    pub k_invariance: f64,
    /// `S(KX,KY) = σS(X,Y)` for the Ricci tensor `S`.
    pub ricci_invariance: f64,
    /// `(σ − ε)S(X,Y) = tr[V ↦ K(R(X,KY)V)]`.
    pub trace_identity: f64,
}

impl CurvatureIdentityReport {
    pub fn max(&self) -> f64 {
        self.commutation.max(self.k_invariance).max(self.ricci_invariance).max(self.trace_identity)
    }
}

fn require_parallel(g: &MetricField, k: &KField, plan: &SamplePlan, tol: f64) -> Result<(), TensorError> {
    let kl = kahler_like_check(g, k, plan, tol)?;
    if !kl.passed {
        return Err(TensorError::Hypothesis { nabla_k: kl.max_nabla_k });
    }
    Ok(())
}

/// Residuals are relative to `max(1, ‖R‖)` at each point.
pub fn curvature_k_identities(
    g: &MetricField,
    k: &KField,
    plan: &SamplePlan,
    tol: f64,
) -> Result<CurvatureIdentityReport, TensorError> {
    require_parallel(g, k, plan, tol)?;
    let n = g.dim();
    let (s, e) = (k.sigma, k.epsilon);
    let mut out =
        CurvatureIdentityReport { commutation: 0.0, k_invariance: 0.0, ricci_invariance: 0.0, trace_identity: 0.0 };
    for p in plan.points() {
        let geo = g.geometry(p)?;
        let kp = KPoint::at(k, p)?;
        let kk = |a: usize, b: usize| kp.k(a, b);
        let scale = linalg::norm(&geo.riemann).max(1.0);
        let (mut c1, mut c2, mut c3, mut c4) = (0.0, 0.0, 0.0, 0.0);
        for l in 0..n {
            for m in 0..n {
                for v in 0..n {
                    for t in 0..n {
                        let mut comm = 0.0;
                        let mut rot = 0.0;
                        for a in 0..n {
                            comm += geo.riemann(l, a, v, t) * kk(a, m) - kk(l, a) * geo.riemann(a, m, v, t);
                            for b in 0..n {
                                rot += geo.riemann(l, m, a, b) * kk(a, v) * kk(b, t);
                            }
                        }
                        c1 += comm * comm;
                        c2 += (rot - s * geo.riemann[i4(n, l, m, v, t)]).powi(2);
                    }
                }
            }
        }
        for m in 0..n {
            for v in 0..n {
                let mut rot = 0.0;
                let mut tr = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        rot += geo.ricci[a * n + b] * kk(a, m) * kk(b, v);
                        for c in 0..n {
                            tr += kk(c, a) * geo.riemann(a, c, m, b) * kk(b, v);
                        }
                    }
                }
                let ric = geo.ricci[m * n + v];
                c3 += (rot - s * ric).powi(2);
                c4 += ((s - e) * ric - tr).powi(2);
            }
        }
        out.commutation = out.commutation.max(c1.sqrt() / scale);
        out.k_invariance = out.k_invariance.max(c2.sqrt() / scale);
        out.ricci_invariance = out.ricci_invariance.max(c3.sqrt() / scale);
        out.trace_identity = out.trace_identity.max(c4.sqrt() / scale);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RicciTwinReport {
    /// Best fit of `F = λh` with `F(X,Y) = S(KX,Y)`.
    pub lambda: f64,
    /// `max ‖F − λh‖ / ‖h‖`.
    pub max_residual: f64,
    pub einstein: EinsteinFit,
}

pub fn ricci_twin_check(
    g: &MetricField,
    k: &KField,
    plan: &SamplePlan,
    tol: f64,
) -> Result<RicciTwinReport, TensorError> {
    require_parallel(g, k, plan, tol)?;
    let n = g.dim();
    let mut pairs = Vec::with_capacity(plan.len());
    let mut num = CompensatedSum::default();
    let mut den = CompensatedSum::default();
    for p in plan.points() {
        let geo = g.geometry(p)?;
        let kp = KPoint::at(k, p)?;
        let kt = linalg::transpose(&kp.k, n);
        let f = linalg::matmul(&kt, &geo.ricci, n);
        let h = linalg::matmul(&kt, &geo.g, n);
        for (a, b) in f.iter().zip(&h) {
            num.add(a * b);
            den.add(b * b);
        }
        pairs.push((f, h));
    }
    let lambda = if den.total() > 0.0 { num.total() / den.total() } else { 0.0 };
    let max_residual = pairs
        .iter()
        .map(|(f, h)| {
            let d: Vec<f64> = f.iter().zip(h).map(|(a, b)| a - lambda * b).collect();
            linalg::norm(&d) / linalg::norm(h)
        })
        .fold(0.0, f64::max);
    Ok(RicciTwinReport { lambda, max_residual, einstein: super::einstein_residual(g, plan)? })
}
