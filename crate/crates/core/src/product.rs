//! Split and warped products with their almost-product structure, and the
//! Riemannian metric attached to an indefinite one by a background metric.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::dsl::{ChartSpec, DslError, Expr, Func, ScalarExpr};
use crate::linalg;
use crate::tensor::{einstein_residual, EinsteinFit, KField, MetricField, SamplePlan, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProductError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error("coordinate `{0}` appears in both factors")]
    ChartCollision(String),
    #[error("warp must be an expression over the first factor's coordinates")]
    WarpChart,
    #[error("a warp is present; use build_warped")]
    Warped,
    #[error("background metric is not positive definite at {point:?}")]
    NotPositive { point: Vec<f64> },
    #[error("metric is degenerate at {point:?}")]
    Degenerate { point: Vec<f64> },
}

/// `g₁ ⊕ e^{2θ} g₂` on the union of two disjoint charts.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSpec {
    pub factor1: MetricField,
    pub factor2: MetricField,
    pub warp: Option<ScalarExpr>,
}

impl ProductSpec {
    pub fn new(factor1: MetricField, factor2: MetricField) -> Result<Self, ProductError> {
        let spec = Self { factor1, factor2, warp: None };
        spec.chart()?;
        Ok(spec)
    }

    pub fn with_warp(mut self, theta: ScalarExpr) -> Result<Self, ProductError> {
        if theta.coords() != self.factor1.chart().coords.as_slice() {
            return Err(ProductError::WarpChart);
        }
        self.warp = Some(theta);
        Ok(self)
    }

    /// Parses `θ` over the first factor's coordinates.
    pub fn with_warp_text(self, theta: &str) -> Result<Self, ProductError> {
        let t = ScalarExpr::parse(theta, &self.factor1.chart().coords)?;
        self.with_warp(t)
    }

    /// Dimension of the first factor.
    pub fn k(&self) -> usize {
        self.factor1.dim()
    }

    pub fn dim(&self) -> usize {
        self.factor1.dim() + self.factor2.dim()
    }

    /// Joint chart: first factor's coordinates, then the second's.
    pub fn chart(&self) -> Result<ChartSpec, ProductError> {
        let (c1, c2) = (self.factor1.chart(), self.factor2.chart());
        if let Some(dup) = c1.coords.iter().find(|c| c2.coords.contains(c)) {
            return Err(ProductError::ChartCollision(dup.clone()));
        }
        let coords: Vec<&str> = c1.coords.iter().chain(&c2.coords).map(String::as_str).collect();
        let chart = ChartSpec::new(format!("{}×{}", c1.name, c2.name), &coords)?;
        Ok(match (&c1.domain, &c2.domain) {
            (Some(d1), Some(d2)) => chart.with_domain(d1.iter().chain(d2).copied().collect())?,
            _ => chart,
        })
    }

    /// Splits a joint point into the two factor points.
    pub fn split<'a>(&self, point: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        point.split_at(self.k())
    }
}

fn assemble(spec: &ProductSpec, second_factor: impl Fn(Expr) -> Expr) -> Result<MetricField, ProductError> {
    let chart = spec.chart()?;
    let (k, n) = (spec.k(), spec.dim());
    let names = &chart.coords;
    let first: Vec<usize> = (0..k).collect();
    let second: Vec<usize> = (k..n).collect();
    let zero = ScalarExpr::constant(0.0, names);
    let mut comps = vec![zero; n * n];
    for a in 0..k {
        for b in 0..k {
            comps[a * n + b] = spec.factor1.component(a, b).reindex(names, &first);
        }
    }
    for a in 0..n - k {
        for b in 0..n - k {
            let e = spec.factor2.component(a, b).reindex(names, &second);
            comps[(k + a) * n + k + b] = ScalarExpr::from_expr(second_factor(e.expr), names);
        }
    }
    Ok(MetricField::new(chart, comps)?)
}

/// `P = diag(−I_k, I_{n−k})` on `chart`, with `σ = +1`.
pub fn block_involution(chart: &ChartSpec, k: usize) -> Result<KField, TensorError> {
    let n = chart.dim();
    let p: Vec<f64> = (0..n * n)
        .map(|i| match (i / n == i % n, i / n < k) {
            (false, _) => 0.0,
            (true, true) => -1.0,
            (true, false) => 1.0,
        })
        .collect();
    KField::constant(chart.clone(), &p, 1.0, 1.0)
}

/// The block metric `g₁ ⊕ g₂` and its product structure.
pub fn build_product(spec: &ProductSpec) -> Result<(MetricField, KField), ProductError> {
    if spec.warp.is_some() {
        return Err(ProductError::Warped);
    }
    let g = assemble(spec, |e| e)?;
    let p = block_involution(g.chart(), spec.k())?;
    Ok((g, p))
}

/// `g₁ ⊕ e^{2θ} g₂`. A literal constant `θ` is folded into a number, so
/// `θ = 0` gives exactly the unwarped product.
pub fn build_warped(spec: &ProductSpec) -> Result<MetricField, ProductError> {
    let chart = spec.chart()?;
    let theta = match &spec.warp {
        None => return assemble(spec, |e| e),
        Some(t) => t.reindex(&chart.coords, &(0..spec.k()).collect::<Vec<_>>()),
    };
    let factor = match theta.expr {
        Expr::Num(t) => Expr::Num((2.0 * t).exp()),
        e => Expr::call(Func::Exp, Expr::times(Expr::Num(2.0), e)),
    };
    assemble(spec, |e| Expr::times(factor.clone(), e))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductEinsteinReport {
    pub factor1: EinsteinFit,
    pub factor2: EinsteinFit,
    pub joint: EinsteinFit,
    /// Both factors Einstein with the same constant.
    pub factors_agree: bool,
    pub joint_einstein: bool,
}

impl ProductEinsteinReport {
    /// The product is Einstein exactly when both factors are, with equal
    /// constants.
    pub fn consistent(&self) -> bool {
        self.factors_agree == self.joint_einstein
    }
}

/// Einstein fits of each factor and of the product over a plan on the
/// joint chart.
pub fn einstein_product_criterion(
    spec: &ProductSpec,
    plan: &SamplePlan,
    tol: f64,
) -> Result<ProductEinsteinReport, ProductError> {
    let (g, _) = build_product(spec)?;
    let project = |first: bool| -> Result<SamplePlan, TensorError> {
        let pts = plan
            .points()
            .iter()
            .map(|p| {
                let (a, b) = spec.split(p);
                if first {
                    a.to_vec()
                } else {
                    b.to_vec()
                }
            })
            .collect();
        SamplePlan::explicit(pts)
    };
    let factor1 = einstein_residual(&spec.factor1, &project(true)?)?;
    let factor2 = einstein_residual(&spec.factor2, &project(false)?)?;
    let joint = einstein_residual(&g, plan)?;
    let gap = (factor1.gamma - factor2.gamma).abs();
    let factors_agree =
        factor1.max_residual <= tol && factor2.max_residual <= tol && gap <= tol * factor1.gamma.abs().max(1.0);
    let joint_einstein = joint.max_residual <= tol;
    Ok(ProductEinsteinReport { factor1, factor2, joint, factors_agree, joint_einstein })
}

/// `P` and the positive definite `h` at one point, as row-major matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannianPoint {
    pub p: Vec<f64>,
    pub h: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Riemannianization {
    pub points: Vec<RiemannianPoint>,
    /// `P = ±I` at every point.
    pub trivial: bool,
    /// `max ‖P² − I‖`.
    pub involution: f64,
    /// `max ‖PᵗhP − h‖ / ‖h‖`.
    pub invariance: f64,
    /// `max ‖Pᵗh − g‖ / ‖g‖`.
    pub reconstruction: f64,
}

/// `P = sign(h0⁻¹g)` and `h = gP` at a single point.
pub fn riemannianize_at(g: &[f64], h0: &[f64], n: usize) -> Option<RiemannianPoint> {
    let gm = linalg::to_dmatrix(g, n);
    let l = nalgebra::Cholesky::new(linalg::to_dmatrix(h0, n))?.l();
    let linv = l.clone().try_inverse()?;
    let b = &linv * &gm * linv.transpose();
    let b = (&b + b.transpose()) * 0.5;
    let eig = b.symmetric_eigen();
    let scale = eig.eigenvalues.amax();
    if eig.eigenvalues.iter().any(|x| x.abs() <= 1e-12 * scale) {
        return None;
    }
    let signs = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::signum));
    let p = linv.transpose() * &eig.eigenvectors * signs * eig.eigenvectors.transpose() * l.transpose();
    let h = &gm * &p;
    let h = (&h + h.transpose()) * 0.5;
    let flat = |m: DMatrix<f64>| m.transpose().iter().copied().collect::<Vec<f64>>();
    Some(RiemannianPoint { p: flat(p), h: flat(h) })
}

/// Pointwise Riemannian metric `h` and involution `P` with
/// `g(X, Y) = h(PX, Y)` and `h(PX, PY) = h(X, Y)`.
pub fn riemannianize(g: &MetricField, h0: &MetricField, plan: &SamplePlan) -> Result<Riemannianization, ProductError> {
    if g.chart().coords != h0.chart().coords {
        return Err(TensorError::ChartMismatch { left: g.chart().name.clone(), right: h0.chart().name.clone() }.into());
    }
    let n = g.dim();
    let mut out =
        Riemannianization { points: Vec::new(), trivial: true, involution: 0.0, invariance: 0.0, reconstruction: 0.0 };
    let (mut all_plus, mut all_minus) = (true, true);
    for x in plan.points() {
        let (gv, hv) = (g.values(x)?, h0.values(x)?);
        if nalgebra::Cholesky::new(linalg::to_dmatrix(&hv, n)).is_none() {
            return Err(ProductError::NotPositive { point: x.clone() });
        }
        let rp = riemannianize_at(&gv, &hv, n).ok_or_else(|| ProductError::Degenerate { point: x.clone() })?;
        let (p, h) = (linalg::to_dmatrix(&rp.p, n), linalg::to_dmatrix(&rp.h, n));
        let gm = linalg::to_dmatrix(&gv, n);
        let id = DMatrix::<f64>::identity(n, n);
        out.involution = out.involution.max((&p * &p - &id).norm());
        out.invariance = out.invariance.max((p.transpose() * &h * &p - &h).norm() / h.norm());
        out.reconstruction = out.reconstruction.max((p.transpose() * &h - &gm).norm() / gm.norm());
        all_plus &= (&p - &id).norm() <= 1e-9;
        all_minus &= (&p + &id).norm() <= 1e-9;
        out.points.push(rp);
    }
    out.trivial = all_plus || all_minus;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(name: &str, coords: &[&str]) -> MetricField {
        let chart = ChartSpec::new(name, coords).unwrap().with_domain(vec![(-1.0, 1.0); coords.len()]).unwrap();
        MetricField::diagonal(chart, &vec!["1"; coords.len()]).unwrap()
    }

    #[test]
    fn product_blocks_and_involution() {
        let spec = ProductSpec::new(flat("a", &["x"]), flat("b", &["u", "v"])).unwrap();
        let (g, p) = build_product(&spec).unwrap();
        assert_eq!(g.values(&[0.1, 0.2, 0.3]).unwrap(), vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let pv: Vec<f64> = p.jets(&[0.0; 3]).unwrap().iter().map(|j| j.value).collect();
        assert_eq!(pv, vec![-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn colliding_charts_rejected() {
        let e = ProductSpec::new(flat("a", &["x"]), flat("b", &["x", "y"])).unwrap_err();
        assert_eq!(e, ProductError::ChartCollision("x".into()));
    }

    #[test]
    fn zero_warp_is_the_product() {
        let spec = ProductSpec::new(flat("a", &["t"]), flat("b", &["x"])).unwrap();
        let plain = build_product(&spec).unwrap().0;
        assert_eq!(build_warped(&spec.clone().with_warp_text("0").unwrap()).unwrap(), plain);
        let w = build_warped(&spec.with_warp_text("t").unwrap()).unwrap();
        assert!((w.values(&[0.5, 0.0]).unwrap()[3] - 1f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn riemannianize_diagonal_cases() {
        let r = riemannianize_at(&[1.0, 0.0, 0.0, -1.0], &[1.0, 0.0, 0.0, 1.0], 2).unwrap();
        assert_eq!(r.p, vec![1.0, 0.0, 0.0, -1.0]);
        assert_eq!(r.h, vec![1.0, 0.0, 0.0, 1.0]);
        let mut mink = vec![0.0; 16];
        for (i, s) in [-1.0, 1.0, 1.0, 1.0].iter().enumerate() {
            mink[i * 5] = *s;
        }
        let id4: Vec<f64> = linalg::identity(4);
        let r = riemannianize_at(&mink, &id4, 4).unwrap();
        assert_eq!(r.p, mink);
        assert_eq!(r.h, id4);
    }

    #[test]
    fn definite_metric_gives_trivial_structure() {
        let g = flat("a", &["x", "y"]);
        let plan = SamplePlan::explicit(vec![vec![0.0, 0.0], vec![0.5, 0.1]]).unwrap();
        let r = riemannianize(&g, &g, &plan).unwrap();
        assert!(r.trivial);
        let chart = g.chart().clone();
        let split = MetricField::diagonal(chart, &["1", "-1"]).unwrap();
        let r = riemannianize(&split, &g, &plan).unwrap();
        assert!(!r.trivial);
        let bad = MetricField::diagonal(g.chart().clone(), &["1", "-1"]).unwrap();
        assert!(matches!(riemannianize(&g, &bad, &plan), Err(ProductError::NotPositive { .. })));
    }
}
