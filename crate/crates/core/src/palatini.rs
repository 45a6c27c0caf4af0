//! First-order (Palatini) field equations for `L = f(S)·√|det h|` with
//! `S = h^{μα}h^{νβ}S_{αβ}S_{μν}` and `S_{μν}` the symmetric Ricci tensor of
//! an independent connection `Γ`.
//!
//! A candidate solution is assembled from an Einstein metric `g` with
//! `Ric(g) = g`, a compatible structure `K`, and a simple root `c` of
//! `f′(S)S − (n/4)f(S)`; then `Γ` is the Levi-Civita connection of `g`,
//! `ε = c/n`, and `h = Kᵗg/√|ε|` so that `(h⁻¹g)² = εI`. Nothing here solves
//! the equations; candidates are checked pointwise.

use thiserror::Error;

use crate::dsl::Jet2;
use crate::linalg;
use crate::roots::{classify_roots, epsilon_of_root, LagrangianSpec, RootEntry, RootError};
use crate::scalar::{Dual, Field, RealField};
use crate::tensor::{einstein_residual, EinsteinFit, Geometry, KField, MetricField, SamplePlan, TensorError};

/// Tolerance on `|γ − 1|` and on the Einstein residual of the input metric.
pub const EINSTEIN_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PalatiniError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(
        "metric must satisfy Ric = g: fitted γ = {gamma}, residual {residual:e} \
         (for Ric = γg with γ > 0, use g/γ; Ricci is unchanged by constant rescaling)"
    )]
    NotEinstein { gamma: f64, residual: f64 },
    #[error("S = {c} is not an admissible root: {reason}")]
    Inadmissible { c: f64, reason: &'static str },
    #[error("ε < 0 needs an even dimension, got {0}")]
    OddDimension(usize),
    #[error("ε = {epsilon} but K² = {k_epsilon}·I")]
    SignMismatch { epsilon: f64, k_epsilon: f64 },
    #[error("metric has dimension {metric} but the Lagrangian is for n = {lagrangian}")]
    Dimension { metric: usize, lagrangian: usize },
    #[error("Kᵗg is antisymmetric for this K; it cannot serve as h")]
    TwoFormTwin,
}

/// An assembled candidate `(h, Γ)` with its ingredients.
#[derive(Clone, Debug)]
pub struct PalatiniSolution {
    pub g: MetricField,
    pub k: KField,
    /// `h = scale·Kᵗg`.
    pub h: MetricField,
    pub scale: f64,
    pub spec: LagrangianSpec,
    pub root: RootEntry,
    pub epsilon: f64,
    pub fit: EinsteinFit,
    twin: MetricField,
}

impl PalatiniSolution {
    /// The same ingredients with `h = scale·Kᵗg` for another `scale`.
    pub fn with_scale(&self, scale: f64) -> Self {
        Self { h: self.twin.scaled(scale), scale, ..self.clone() }
    }
}

/// Builds `(h, Γ)` from `g` (with `Ric(g) = g` on `plan`), a compatible `K`
/// and a root `c`.
pub fn assemble(
    g: &MetricField,
    k: &KField,
    spec: &LagrangianSpec,
    c: f64,
    plan: &SamplePlan,
) -> Result<PalatiniSolution, PalatiniError> {
    let n = g.dim();
    if n != spec.n() {
        return Err(PalatiniError::Dimension { metric: n, lagrangian: spec.n() });
    }
    let fit = einstein_residual(g, plan)?;
    if (fit.gamma - 1.0).abs() > EINSTEIN_TOLERANCE || fit.max_residual > EINSTEIN_TOLERANCE {
        return Err(PalatiniError::NotEinstein { gamma: fit.gamma, residual: fit.max_residual });
    }
    if c == 0.0 {
        return Err(PalatiniError::Inadmissible { c, reason: "c = 0 gives an almost-tangent structure" });
    }
    let epsilon = epsilon_of_root(c, spec)?;
    let report = classify_roots(spec);
    let root = report
        .roots
        .iter()
        .find(|r| (r.c - c).abs() <= 1e-9 * c.abs().max(1.0))
        .cloned()
        .ok_or(PalatiniError::Inadmissible { c, reason: "not found among the real roots" })?;
    if !root.admissible {
        return Err(PalatiniError::Inadmissible { c, reason: "root is not simple" });
    }
    if epsilon.signum() != k.epsilon {
        return Err(PalatiniError::SignMismatch { epsilon, k_epsilon: k.epsilon });
    }
    if epsilon < 0.0 && n % 2 == 1 {
        return Err(PalatiniError::OddDimension(n));
    }
    let twin = crate::tensor::twin_field(g, k, plan, 1e-9)?.as_metric().ok_or(PalatiniError::TwoFormTwin)??;
    let scale = 1.0 / epsilon.abs().sqrt();
    Ok(PalatiniSolution {
        g: g.clone(),
        k: k.clone(),
        h: twin.scaled(scale),
        scale,
        spec: spec.clone(),
        root,
        epsilon,
        fit,
        twin,
    })
}

fn poly<F: Field>(coeffs: &[f64], x: F) -> F {
    coeffs.iter().rev().fold(F::zero(), |acc, &c| acc * x + F::from_f64(c))
}

/// `S`, `S h⁻¹ S`, and the density `f′(S)√|det h| h⁻¹ S h⁻¹` at one point.
struct Invariants<R> {
    scalar: R,
    ssh: Vec<R>,
    density: Vec<R>,
}

fn invariants<R: RealField>(spec: &LagrangianSpec, h: &[R], s: &[R], n: usize) -> Option<(Invariants<R>, R)> {
    let (hinv, det) = linalg::invert(h, n)?;
    let hs = linalg::matmul(&hinv, s, n);
    let scalar = (0..n * n).fold(R::zero(), |acc, k| acc + hs[k] * hs[(k % n) * n + k / n]);
    let ssh = linalg::matmul(s, &hs, n);
    let fp = poly(&crate::roots::derivative(spec.coeffs()), scalar);
    let weight = fp * det.abs().sqrt();
    let density = linalg::matmul(&hs, &hinv, n).into_iter().map(|x| weight * x).collect();
    Some((Invariants { scalar, ssh, density }, det))
}

fn symmetric_part<R: Field>(t: &[R], n: usize) -> Vec<R> {
    let half = R::from_f64(0.5);
    (0..n * n).map(|k| half * (t[k] + t[(k % n) * n + k / n])).collect()
}

fn degenerate(point: &[f64]) -> TensorError {
    TensorError::Degenerate { det: 0.0, point: point.to_vec() }
}

/// The scalar `S = h^{μα}h^{νβ}S_{αβ}S_{μν}` at a point.
pub fn scalar_invariant(sol: &PalatiniSolution, point: &[f64]) -> Result<f64, PalatiniError> {
    let n = sol.g.dim();
    let geo = sol.g.geometry(point)?;
    let h = sol.h.values(point)?;
    let (inv, _) = invariants(&sol.spec, &h, &symmetric_part(&geo.ricci, n), n).ok_or_else(|| degenerate(point))?;
    Ok(inv.scalar)
}

/// Worst pointwise residuals of the field equations over a plan.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    /// `f′(S) h^{αβ}S_{μα}S_{νβ} − ¼f(S)h_{μν}`, relative to the size of its
    /// two terms.
    pub field_equation: f64,
    /// `∇_λ(f′(S)√|det h| h^{μα}h^{νβ}S_{αβ})` with the weight-one density
    /// term, relative to `‖∂T‖ + (1 + ‖Γ‖)‖T‖`.
    pub connection_equation: f64,
    /// `|S − c| / max(1, |c|)`.
    pub scalar: f64,
    /// `|det(S)² − εⁿ det(h)²|` relative to `det(S)² + |εⁿ det(h)²|`.
    pub regularity: f64,
    pub points: usize,
}

impl VerificationReport {
    pub fn max(&self) -> f64 {
        self.field_equation.max(self.connection_equation).max(self.scalar).max(self.regularity)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// Evaluates both field equations, `S = c`, and the determinant identity.
///
/// The covariant derivative of the density `T^{μν}` is
/// `∂_λT^{μν} + Γ^μ_{λρ}T^{ρν} + Γ^ν_{λρ}T^{μρ} − Γ^ρ_{ρλ}T^{μν}`; `∂_λT`
/// comes from a dual-number evaluation along each coordinate, which carries
/// the third derivatives of `g` hidden in `∂Ric`.
pub fn verify_euler_lagrange(sol: &PalatiniSolution, plan: &SamplePlan) -> Result<VerificationReport, PalatiniError> {
    let n = sol.g.dim();
    let c = sol.root.c;
    let mut r = VerificationReport { points: plan.len(), ..Default::default() };
    for x in plan.points() {
        let geo = sol.g.geometry(x)?;
        let s = symmetric_part(&geo.ricci, n);
        let h = sol.h.values(x)?;
        let (inv, det_h) = invariants(&sol.spec, &h, &s, n).ok_or_else(|| degenerate(x))?;

        let (fv, fp) = (sol.spec.f(inv.scalar), sol.spec.f_prime(inv.scalar));
        let e: Vec<f64> = inv.ssh.iter().zip(&h).map(|(a, b)| fp * a - 0.25 * fv * b).collect();
        let size = fp.abs() * linalg::norm(&inv.ssh) + 0.25 * fv.abs() * linalg::norm(&h);
        r.field_equation = r.field_equation.max(linalg::norm(&e) / size.max(f64::MIN_POSITIVE));

        r.scalar = r.scalar.max((inv.scalar - c).abs() / c.abs().max(1.0));

        let det_s = linalg::to_dmatrix(&s, n).determinant();
        let (lhs, rhs) = (det_s * det_s, sol.epsilon.powi(n as i32) * det_h * det_h);
        r.regularity = r.regularity.max((lhs - rhs).abs() / (lhs.abs() + rhs.abs()));

        let t = &inv.density;
        let gamma_norm = linalg::norm(&geo.gamma);
        for l in 0..n {
            let dual: Vec<Dual<f64>> =
                x.iter().enumerate().map(|(i, &v)| Dual::new(v, if i == l { 1.0 } else { 0.0 })).collect();
            let dgeo: Geometry<Dual<f64>> = sol.g.geometry(&dual)?;
            let dh: Vec<Dual<f64>> = sol.h.jets(&dual)?.into_iter().map(|j| j.value).collect();
            let (dinv, _) =
                invariants(&sol.spec, &dh, &symmetric_part(&dgeo.ricci, n), n).ok_or_else(|| degenerate(x))?;
            let dt: Vec<f64> = dinv.density.iter().map(|d| d.tangent).collect();
            let trace: f64 = (0..n).map(|p| geo.gamma(p, p, l)).sum();
            let mut cov = vec![0.0; n * n];
            for mu in 0..n {
                for nu in 0..n {
                    let mut v = dt[mu * n + nu] - trace * t[mu * n + nu];
                    for p in 0..n {
                        v += geo.gamma(mu, l, p) * t[p * n + nu] + geo.gamma(nu, l, p) * t[mu * n + p];
                    }
                    cov[mu * n + nu] = v;
                }
            }
            let size = linalg::norm(&dt) + (1.0 + gamma_norm) * linalg::norm(t);
            r.connection_equation = r.connection_equation.max(linalg::norm(&cov) / size.max(f64::MIN_POSITIVE));
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RoundTripReport {
    /// `max ‖R_(μν)(Γ) − g‖ / ‖g‖`.
    pub metric: f64,
    /// `max ‖Γ(R_(μν)) − Γ‖ / (1 + ‖Γ‖)`: the connection rebuilt from the
    /// symmetric Ricci tensor taken as a metric.
    pub connection: f64,
}

/// Takes `g' = R_(μν)(Γ)` as a metric and compares `g'` with `g` and its
/// Levi-Civita connection with `Γ`.
pub fn round_trip_check(sol: &PalatiniSolution, plan: &SamplePlan) -> Result<RoundTripReport, PalatiniError> {
    let n = sol.g.dim();
    let mut r = RoundTripReport::default();
    for x in plan.points() {
        let geo = sol.g.geometry(x)?;
        let s = symmetric_part(&geo.ricci, n);
        let d: Vec<f64> = s.iter().zip(&geo.g).map(|(a, b)| a - b).collect();
        r.metric = r.metric.max(linalg::norm(&d) / linalg::norm(&geo.g));

        let mut jets: Vec<Jet2<f64>> = s.iter().map(|&v| Jet2::constant(v, n)).collect();
        for l in 0..n {
            let dgeo = sol.g.geometry_along(x, l)?;
            for (jet, v) in jets.iter_mut().zip(symmetric_part(&dgeo.ricci, n)) {
                jet.grad[l] = v.tangent;
            }
        }
        let rebuilt = Geometry::from_jets(&jets, n).ok_or_else(|| degenerate(x))?;
        let d: Vec<f64> = rebuilt.gamma.iter().zip(&geo.gamma).map(|(a, b)| a - b).collect();
        r.connection = r.connection.max(linalg::norm(&d) / (1.0 + linalg::norm(&geo.gamma)));
    }
    Ok(r)
}
