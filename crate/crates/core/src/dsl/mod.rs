//! Expression language for metric components, endomorphism fields, warp
//! functions and the like, with exact first and second derivatives.

mod ast;
mod jet;
mod parser;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

pub use ast::{Expr, Func};
pub use jet::{Jet2, Jet2Value};

use crate::scalar::{Analytic, Field, RealField};

/// Names reserved by the grammar; they cannot be used as coordinates.
pub const RESERVED: &[&str] = &["i", "pi", "sin", "cos", "exp", "sqrt", "log", "re", "im", "conj"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DslError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown symbol `{name}` at position {position}")]
    UnknownSymbol { name: String, position: usize },
    #[error("unknown function `{name}` at position {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("domain error in `{subexpr}` at {point}: {reason}")]
    Domain { subexpr: String, point: String, reason: String },
    #[error("`{subexpr}` is not complex-analytic")]
    NonAnalytic { subexpr: String },
    #[error("expression `{expr}` is not real-valued at {point} (imaginary part {imag:e})")]
    NotReal { expr: String, point: String, imag: f64 },
    #[error("point has {got} coordinates, chart expects {expected}")]
    Arity { expected: usize, got: usize },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
}

/// A named coordinate chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartSpec {
    pub name: String,
    pub coords: Vec<String>,
    /// Optional open sampling interval per coordinate.
    pub domain: Option<Vec<(f64, f64)>>,
}

impl ChartSpec {
    pub fn new(name: impl Into<String>, coords: &[&str]) -> Result<Self, DslError> {
        let chart = Self { name: name.into(), coords: coords.iter().map(|s| s.to_string()).collect(), domain: None };
        chart.validate()?;
        Ok(chart)
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Result<Self, DslError> {
        self.domain = Some(domain);
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn validate(&self) -> Result<(), DslError> {
        if self.coords.is_empty() {
            return Err(DslError::InvalidChart(format!("chart `{}` has no coordinates", self.name)));
        }
        for (i, c) in self.coords.iter().enumerate() {
            let valid = c.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_')
                && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
            if !valid || RESERVED.contains(&c.as_str()) {
                return Err(DslError::InvalidChart(format!("`{c}` is not a usable coordinate name")));
            }
            if self.coords[..i].contains(c) {
                return Err(DslError::InvalidChart(format!("coordinate `{c}` repeated")));
            }
        }
        if let Some(d) = &self.domain {
            if d.len() != self.dim() {
                return Err(DslError::InvalidChart(format!(
                    "chart `{}` has {} sampling intervals for {} coordinates",
                    self.name,
                    d.len(),
                    self.dim()
                )));
            }
            if let Some((lo, hi)) = d.iter().find(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo >= hi) {
                return Err(DslError::InvalidChart(format!("empty sampling interval ({lo}, {hi})")));
            }
        }
        Ok(())
    }
}

/// A parsed expression together with the coordinate names it refers to.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarExpr {
    pub expr: Expr,
    coords: Arc<[String]>,
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, &self.coords)
    }
}

/// Parses `text` against the coordinates of `chart`; free identifiers may
/// name entries of `params`.
pub fn parse_scalar(text: &str, chart: &ChartSpec, params: &BTreeMap<String, f64>) -> Result<ScalarExpr, DslError> {
    ScalarExpr::parse_with(text, &chart.coords, params)
}

/// Value, gradient and Hessian of `expr` at a real point.
pub fn eval_jet2(expr: &ScalarExpr, point: &[f64]) -> Result<Jet2Value, DslError> {
    expr.eval_real(point)
}

/// Value and holomorphic gradient `∂/∂z^a` at a complex point.
pub fn eval_complex_jet1(expr: &ScalarExpr, point: &[Complex64]) -> Result<(Complex64, Vec<Complex64>), DslError> {
    Ok(expr.eval_holomorphic(point)?.first_order())
}

impl ScalarExpr {
    pub fn parse_with(text: &str, coords: &[String], params: &BTreeMap<String, f64>) -> Result<Self, DslError> {
        let expr = parser::Parser::new(text, coords, params)?.parse()?;
        Ok(Self { expr, coords: coords.into() })
    }

    /// Parses with no parameters. Convenient for fixtures.
    pub fn parse(text: &str, coords: &[String]) -> Result<Self, DslError> {
        Self::parse_with(text, coords, &BTreeMap::new())
    }

    pub fn from_expr(expr: Expr, coords: &[String]) -> Self {
        Self { expr, coords: coords.into() }
    }

    pub fn constant(x: f64, coords: &[String]) -> Self {
        Self::from_expr(Expr::Num(x), coords)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    /// Moves the expression onto another coordinate list; coordinate `i`
    /// becomes `target[map[i]]`.
    pub fn reindex(&self, target: &[String], map: &[usize]) -> Self {
        Self::from_expr(self.expr.substitute(&|i| Expr::Coord(map[i])), target)
    }

    pub fn is_constant_zero(&self) -> bool {
        matches!(self.expr, Expr::Num(x) if x == 0.0)
    }

    fn describe(&self, point: &[String]) -> String {
        let parts: Vec<String> = self.coords.iter().zip(point).map(|(c, v)| format!("{c}={v}")).collect();
        format!("({})", parts.join(", "))
    }

    /// Real evaluation over any real scalar type. Arithmetic runs on the
    /// complex counterpart so that `re`, `im`, `conj` and `i` are usable;
    /// the result must be real.
    pub fn eval_real<R: RealField>(&self, point: &[R]) -> Result<Jet2<R>, DslError> {
        let n = self.coords.len();
        if point.len() != n {
            return Err(DslError::Arity { expected: n, got: point.len() });
        }
        let seeds: Vec<Jet2<R::Complex>> =
            point.iter().enumerate().map(|(i, &x)| Jet2::variable(x.complexify(), i, n)).collect();
        let pt = || self.describe(&point.iter().map(|x| format!("{}", x.primal_f64())).collect::<Vec<_>>());
        let jet = eval_tree(&self.expr, &seeds, false).map_err(|f| f.into_error(&self.coords, pt()))?;
        let scale = 1.0 + jet.value.magnitude();
        let imag = std::iter::once(&jet.value).chain(&jet.grad).chain(&jet.hess).map(R::imag_size).fold(0.0, f64::max);
        if imag > 1e-12 * scale {
            return Err(DslError::NotReal { expr: self.to_string(), point: pt(), imag });
        }
        Ok(Jet2 {
            value: R::real_part(jet.value),
            grad: jet.grad.into_iter().map(R::real_part).collect(),
            hess: jet.hess.into_iter().map(R::real_part).collect(),
        })
    }

    /// Complex-valued evaluation at a real point; derivatives are with
    /// respect to the real coordinates.
    pub fn eval_complex_valued(&self, point: &[f64]) -> Result<Jet2<Complex64>, DslError> {
        let n = self.coords.len();
        if point.len() != n {
            return Err(DslError::Arity { expected: n, got: point.len() });
        }
        let seeds: Vec<Jet2<Complex64>> =
            point.iter().enumerate().map(|(i, &x)| Jet2::variable(Complex64::new(x, 0.0), i, n)).collect();
        eval_tree(&self.expr, &seeds, false).map_err(|f| {
            let pt = self.describe(&point.iter().map(|x| format!("{x}")).collect::<Vec<_>>());
            f.into_error(&self.coords, pt)
        })
    }

    /// Holomorphic evaluation: coordinates are complex and derivatives are
    /// `∂/∂z`. Non-analytic functions are rejected.
    pub fn eval_holomorphic(&self, point: &[Complex64]) -> Result<Jet2<Complex64>, DslError> {
        let n = self.coords.len();
        if point.len() != n {
            return Err(DslError::Arity { expected: n, got: point.len() });
        }
        let seeds: Vec<Jet2<Complex64>> = point.iter().enumerate().map(|(i, &z)| Jet2::variable(z, i, n)).collect();
        eval_tree(&self.expr, &seeds, true).map_err(|f| {
            let pt = self.describe(&point.iter().map(|z| format!("{z}")).collect::<Vec<_>>());
            f.into_error(&self.coords, pt)
        })
    }
}

enum Fault<'a> {
    Domain(&'a Expr, &'static str),
    NonAnalytic(&'a Expr),
}

impl Fault<'_> {
    fn into_error(self, coords: &[String], point: String) -> DslError {
        let text = |e: &Expr| {
            let mut s = String::new();
            let _ = e.write(&mut s, coords);
            s
        };
        match self {
            Fault::Domain(e, reason) => DslError::Domain { subexpr: text(e), point, reason: reason.into() },
            Fault::NonAnalytic(e) => DslError::NonAnalytic { subexpr: text(e) },
        }
    }
}

fn on_branch_cut(p: Complex64) -> bool {
    p.re <= 0.0 && p.im.abs() <= 1e-12 * p.re.abs()
}

fn eval_tree<'a, S: Analytic>(e: &'a Expr, vars: &[Jet2<S>], holomorphic: bool) -> Result<Jet2<S>, Fault<'a>> {
    let n = vars.len();
    let out = match e {
        Expr::Num(x) => Jet2::constant(S::from_f64(*x), n),
        Expr::Param { value, .. } => Jet2::constant(S::from_f64(*value), n),
        Expr::Pi => Jet2::constant(S::from_f64(std::f64::consts::PI), n),
        Expr::ImagUnit => Jet2::constant(S::imaginary_unit(), n),
        Expr::Coord(i) => vars[*i].clone(),
        Expr::Neg(a) => eval_tree(a, vars, holomorphic)?.neg(),
        Expr::Add(a, b) => eval_tree(a, vars, holomorphic)?.add(&eval_tree(b, vars, holomorphic)?),
        Expr::Sub(a, b) => eval_tree(a, vars, holomorphic)?.sub(&eval_tree(b, vars, holomorphic)?),
        Expr::Mul(a, b) => eval_tree(a, vars, holomorphic)?.mul(&eval_tree(b, vars, holomorphic)?),
        Expr::Div(a, b) => {
            let num = eval_tree(a, vars, holomorphic)?;
            let den = eval_tree(b, vars, holomorphic)?;
            if den.value.primal() == Complex64::new(0.0, 0.0) {
                return Err(Fault::Domain(e, "division by zero"));
            }
            num.div(&den)
        }
        Expr::Pow(a, k) => {
            let base = eval_tree(a, vars, holomorphic)?;
            if *k < 0 && base.value.primal() == Complex64::new(0.0, 0.0) {
                return Err(Fault::Domain(e, "negative power of zero"));
            }
            base.powi(*k)
        }
        Expr::Call(f, a) => {
            if holomorphic && !f.is_analytic() {
                return Err(Fault::NonAnalytic(e));
            }
            let u = eval_tree(a, vars, holomorphic)?;
            let v = u.value;
            match f {
                Func::Sin => u.compose(v.sin(), v.cos(), -v.sin()),
                Func::Cos => u.compose(v.cos(), -v.sin(), -v.cos()),
                Func::Exp => {
                    let x = v.exp();
                    u.compose(x, x, x)
                }
                Func::Sqrt => {
                    if on_branch_cut(v.primal()) {
                        return Err(Fault::Domain(e, "square root of a non-positive value"));
                    }
                    let r = v.sqrt();
                    u.compose(r, S::one() / r.scale(2.0), -(S::one() / (v * r).scale(4.0)))
                }
                Func::Log => {
                    if on_branch_cut(v.primal()) {
                        return Err(Fault::Domain(e, "logarithm of a non-positive value"));
                    }
                    let r = S::one() / v;
                    u.compose(v.ln(), r, -(r * r))
                }
                Func::Re => u.map(S::re),
                Func::Im => u.map(S::im),
                Func::Conj => u.map(S::conj),
            }
        }
    };
    if !out.is_finite() {
        return Err(Fault::Domain(e, "non-finite result"));
    }
    Ok(out)
}
