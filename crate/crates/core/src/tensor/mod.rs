//! Chart-based tensor calculus on expression-valued fields.
//!
//! Curvature conventions:
//! `R^l_mvs = ∂_v Γ^l_ms − ∂_s Γ^l_mv + Γ^l_av Γ^a_ms − Γ^l_as Γ^a_mv`,
//! `R_ms = R^v_mvs`, and the endomorphism `R(∂_v, ∂_s)` sends `∂_m` to
//! `R^l_mvs ∂_l`. With these the unit sphere has `Ric = (m − 1)g`.

mod geometry;
mod kstructure;
mod plan;

use thiserror::Error;

use crate::dsl::{ChartSpec, DslError, Expr, Jet2, ScalarExpr};
use crate::linalg;
use crate::scalar::{CompensatedSum, Dual, RealField};

pub use geometry::Geometry;
pub(crate) use geometry::{i3, i4};
pub use kstructure::{
    check_k_compatibility, curvature_k_identities, kahler_like_check, nabla_k, nijenhuis, psi_symmetry_check,
    psi_tensor, ricci_twin_check, twin_field, CompatibilityReport, CurvatureIdentityReport, KPoint, KahlerLikeReport,
    PsiSymmetryReport, RicciTwinReport, TwinField, TwinKind,
};
pub use plan::{SamplePlan, DEFAULT_COUNT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error("metric is degenerate at {point:?} (det = {det:e})")]
    Degenerate { det: f64, point: Vec<f64> },
    #[error("component ({row}, {col}) differs from its transpose at {point:?}")]
    NotSymmetric { row: usize, col: usize, point: Vec<f64> },
    #[error("fields live on different charts: `{left}` and `{right}`")]
    ChartMismatch { left: String, right: String },
    #[error("expected {expected} components, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("sample plan: {0}")]
    Plan(String),
    #[error("K is not compatible with g: ‖K² − εI‖ = {square:e}, ‖g(K·,K·) − σg‖ = {metric:e}")]
    Compatibility { square: f64, metric: f64 },
    #[error("identity requires ∇K = 0 but max ‖∇K‖ = {nabla_k:e}")]
    Hypothesis { nabla_k: f64 },
    #[error("{0}")]
    Invalid(String),
}

/// Index position of a tensor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Up,
    Down,
}

/// A tensor at one point, stored row-major over its slots.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTensor {
    pub dim: usize,
    pub variance: Vec<Variance>,
    pub data: Vec<f64>,
}

impl PointTensor {
    pub fn new(dim: usize, variance: Vec<Variance>, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim.pow(variance.len() as u32));
        Self { dim, variance, data }
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[idx.iter().fold(0, |acc, &i| acc * self.dim + i)]
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.data)
    }
}

fn same_chart(a: &ChartSpec, b: &ChartSpec) -> Result<(), TensorError> {
    if a.coords != b.coords {
        return Err(TensorError::ChartMismatch { left: a.name.clone(), right: b.name.clone() });
    }
    Ok(())
}

fn check_shape(chart: &ChartSpec, comps: &[ScalarExpr]) -> Result<(), TensorError> {
    let n = chart.dim();
    if comps.len() != n * n {
        return Err(TensorError::Shape { expected: n * n, got: comps.len() });
    }
    if let Some(c) = comps.iter().find(|c| c.coords() != chart.coords.as_slice()) {
        return Err(TensorError::Invalid(format!("component `{c}` is not over chart `{}`", chart.name)));
    }
    Ok(())
}

/// Parses an `n × n` row-major list of component strings on `chart`.
pub fn parse_components(
    chart: &ChartSpec,
    params: &std::collections::BTreeMap<String, f64>,
    texts: &[&str],
) -> Result<Vec<ScalarExpr>, TensorError> {
    texts.iter().map(|t| Ok(crate::dsl::parse_scalar(t, chart, params)?)).collect()
}

fn eval_all<R: RealField>(comps: &[ScalarExpr], point: &[R]) -> Result<Vec<Jet2<R>>, TensorError> {
    comps.iter().map(|c| Ok(c.eval_real(point)?)).collect()
}

/// A pseudo-Riemannian metric `g_ab` given by expressions on a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    chart: ChartSpec,
    comps: Vec<ScalarExpr>,
    /// Off-diagonal pairs whose two expressions differ textually; these are
    /// compared numerically at every evaluation.
    unverified: Vec<(usize, usize)>,
}

impl MetricField {
    pub fn new(chart: ChartSpec, comps: Vec<ScalarExpr>) -> Result<Self, TensorError> {
        chart.validate()?;
        check_shape(&chart, &comps)?;
        let n = chart.dim();
        let mut unverified = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if comps[a * n + b].expr != comps[b * n + a].expr
                    && comps[a * n + b].to_string() != comps[b * n + a].to_string()
                {
                    unverified.push((a, b));
                }
            }
        }
        Ok(Self { chart, comps, unverified })
    }

    pub fn parse(chart: ChartSpec, texts: &[&str]) -> Result<Self, TensorError> {
        let comps = parse_components(&chart, &Default::default(), texts)?;
        Self::new(chart, comps)
    }

    /// Diagonal metric from per-coordinate expressions.
    pub fn diagonal(chart: ChartSpec, diag: &[&str]) -> Result<Self, TensorError> {
        let n = chart.dim();
        if diag.len() != n {
            return Err(TensorError::Shape { expected: n, got: diag.len() });
        }
        let texts: Vec<&str> = (0..n * n).map(|k| if k / n == k % n { diag[k / n] } else { "0" }).collect();
        Self::parse(chart, &texts)
    }

    pub fn chart(&self) -> &ChartSpec {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.comps
    }

    pub fn component(&self, a: usize, b: usize) -> &ScalarExpr {
        &self.comps[a * self.dim() + b]
    }

    /// Multiplies every component by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| ScalarExpr::from_expr(Expr::times(Expr::Num(k), c.expr.clone()), c.coords()))
            .collect();
        Self { chart: self.chart.clone(), comps, unverified: self.unverified.clone() }
    }

    pub fn jets<R: RealField>(&self, point: &[R]) -> Result<Vec<Jet2<R>>, TensorError> {
        let n = self.dim();
        let mut jets = eval_all(&self.comps, point)?;
        let primal: Vec<f64> = point.iter().map(|x| x.primal_f64()).collect();
        for &(a, b) in &self.unverified {
            let (x, y) = (jets[a * n + b].value.primal_f64(), jets[b * n + a].value.primal_f64());
            if (x - y).abs() > 1e-12 * (1.0 + x.abs().max(y.abs())) {
                return Err(TensorError::NotSymmetric { row: a, col: b, point: primal });
            }
            let avg = jets[a * n + b].add(&jets[b * n + a]).map(|v| v.scale(0.5));
            jets[a * n + b] = avg.clone();
            jets[b * n + a] = avg;
        }
        Ok(jets)
    }

    /// Metric values at a point.
    pub fn values(&self, point: &[f64]) -> Result<Vec<f64>, TensorError> {
        Ok(self.jets(point)?.into_iter().map(|j| j.value).collect())
    }

    pub fn geometry<R: RealField>(&self, point: &[R]) -> Result<Geometry<R>, TensorError> {
        let n = self.dim();
        let jets = self.jets(point)?;
        let primal: Vec<f64> = point.iter().map(|x| x.primal_f64()).collect();
        let values: Vec<f64> = jets.iter().map(|j| j.value.primal_f64()).collect();
        let det = linalg::to_dmatrix(&values, n).determinant();
        let scale = linalg::norm(&values).powi(n as i32).max(f64::MIN_POSITIVE);
        if det.abs() <= 1e-14 * scale || !det.is_finite() {
            return Err(TensorError::Degenerate { det, point: primal });
        }
        Geometry::from_jets(&jets, n).ok_or(TensorError::Degenerate { det, point: primal })
    }

    /// Geometry carrying one extra derivative along coordinate `dir`.
    pub fn geometry_along(&self, point: &[f64], dir: usize) -> Result<Geometry<Dual<f64>>, TensorError> {
        let p: Vec<Dual<f64>> =
            point.iter().enumerate().map(|(i, &x)| Dual::new(x, if i == dir { 1.0 } else { 0.0 })).collect();
        self.geometry(&p)
    }
}

/// A mixed `(1,1)` field `K^μ_ν` (row `μ`, column `ν`) with `K² = εI` and
/// `g(K·, K·) = σg` for the metric it is paired with.
#[derive(Clone, Debug, PartialEq)]
pub struct KField {
    chart: ChartSpec,
    comps: Vec<ScalarExpr>,
    pub epsilon: f64,
    pub sigma: f64,
}

impl KField {
    pub fn new(chart: ChartSpec, comps: Vec<ScalarExpr>, epsilon: f64, sigma: f64) -> Result<Self, TensorError> {
        chart.validate()?;
        check_shape(&chart, &comps)?;
        for (name, v) in [("ε", epsilon), ("σ", sigma)] {
            if v != 1.0 && v != -1.0 {
                return Err(TensorError::Invalid(format!("{name} must be ±1, got {v}")));
            }
        }
        Ok(Self { chart, comps, epsilon, sigma })
    }

    pub fn parse(chart: ChartSpec, texts: &[&str], epsilon: f64, sigma: f64) -> Result<Self, TensorError> {
        let comps = parse_components(&chart, &Default::default(), texts)?;
        Self::new(chart, comps, epsilon, sigma)
    }

    /// A constant field.
    pub fn constant(chart: ChartSpec, k: &[f64], epsilon: f64, sigma: f64) -> Result<Self, TensorError> {
        let comps = k.iter().map(|&x| ScalarExpr::constant(x, &chart.coords)).collect();
        Self::new(chart, comps, epsilon, sigma)
    }

    pub fn chart(&self) -> &ChartSpec {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.comps
    }

    pub fn jets<R: RealField>(&self, point: &[R]) -> Result<Vec<Jet2<R>>, TensorError> {
        eval_all(&self.comps, point)
    }
}

/// Result of fitting `Ric = γg` over a sample plan.
#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinFit {
    /// `Σ R / (n·N)` with `R` the scalar curvature.
    pub gamma: f64,
    /// `max ‖Ric − γg‖ / ‖g‖` over the plan.
    pub max_residual: f64,
    pub points: usize,
}

pub fn christoffel(g: &MetricField, point: &[f64]) -> Result<PointTensor, TensorError> {
    let geo = g.geometry(point)?;
    Ok(PointTensor::new(g.dim(), vec![Variance::Up, Variance::Down, Variance::Down], geo.gamma))
}

pub fn riemann(g: &MetricField, point: &[f64]) -> Result<PointTensor, TensorError> {
    let geo = g.geometry(point)?;
    Ok(PointTensor::new(g.dim(), vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down], geo.riemann))
}

pub fn ricci(g: &MetricField, point: &[f64]) -> Result<PointTensor, TensorError> {
    let geo = g.geometry(point)?;
    Ok(PointTensor::new(g.dim(), vec![Variance::Down, Variance::Down], geo.ricci))
}

pub fn einstein_residual(g: &MetricField, plan: &SamplePlan) -> Result<EinsteinFit, TensorError> {
    let n = g.dim();
    let geos = plan.points().iter().map(|p| g.geometry(p)).collect::<Result<Vec<_>, _>>()?;
    if geos.is_empty() {
        return Err(TensorError::Plan("no sample points".into()));
    }
    let mut sum = CompensatedSum::default();
    for geo in &geos {
        sum.add(geo.scalar_curvature());
    }
    let gamma = sum.total() / (n * geos.len()) as f64;
    let max_residual = geos
        .iter()
        .map(|geo| {
            let diff: Vec<f64> = geo.ricci.iter().zip(&geo.g).map(|(r, g)| r - gamma * g).collect();
            linalg::norm(&diff) / linalg::norm(&geo.g)
        })
        .fold(0.0, f64::max);
    Ok(EinsteinFit { gamma, max_residual, points: geos.len() })
}

/// Maxima over a plan of the structural identities every Levi-Civita
/// connection satisfies.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StructuralReport {
    pub torsion: f64,
    pub metricity: f64,
    pub density_metricity: f64,
    pub bianchi: f64,
}

impl StructuralReport {
    pub fn max(&self) -> f64 {
        self.torsion.max(self.metricity).max(self.density_metricity).max(self.bianchi)
    }
}

pub fn structural_residuals(g: &MetricField, plan: &SamplePlan) -> Result<StructuralReport, TensorError> {
    let mut r = StructuralReport::default();
    for p in plan.points() {
        let geo = g.geometry(p)?;
        r.torsion = r.torsion.max(geo.torsion_residual());
        r.metricity = r.metricity.max(geo.metricity_residual());
        r.density_metricity = r.density_metricity.max(geo.density_metricity_residual());
        r.bianchi = r.bianchi.max(geo.bianchi_residual());
    }
    Ok(r)
}
