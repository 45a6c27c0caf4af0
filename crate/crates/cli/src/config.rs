//! The workspace document: charts, fields, Lagrangians, sample plans and
//! suites, all cross-referenced by name.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use twinmetric::antikahler::{realify_unchecked, HolomorphicMetricField};
use twinmetric::dsl::ChartSpec;
use twinmetric::product::{block_involution, build_product, build_warped, ProductSpec};
use twinmetric::roots::LagrangianSpec;
use twinmetric::tensor::{KField, MetricField};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed workspace document: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{section} `{name}`: {message}")]
    Invalid { section: &'static str, name: String, message: String },
    #[error("{section} `{name}` refers to unknown {target} `{missing}`")]
    Unresolved { section: &'static str, name: String, target: &'static str, missing: String },
    #[error("name `{0}` is used more than once")]
    Duplicate(String),
    #[error("unknown tolerance `{0}`")]
    UnknownTolerance(String),
    #[error("tolerance override must look like NAME=VALUE, got `{0}`")]
    ToleranceSyntax(String),
    #[error("no suite named `{0}`")]
    UnknownSuite(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDef {
    pub coords: Vec<String>,
    #[serde(default)]
    pub domain: Option<Vec<[f64; 2]>>,
}

/// Exactly one of `components`, `diagonal`, `factors` or `realified` must be
/// given; `warp` only with `factors`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDef {
    #[serde(default)]
    pub chart: Option<String>,
    #[serde(default)]
    pub components: Option<Vec<String>>,
    #[serde(default)]
    pub diagonal: Option<Vec<String>>,
    #[serde(default)]
    pub factors: Option<[String; 2]>,
    #[serde(default)]
    pub warp: Option<String>,
    /// Name of a holomorphic metric whose realification this is.
    #[serde(default)]
    pub realified: Option<String>,
}

/// Either explicit `components` on a chart, `involution_of` a product
/// metric, or `complex_structure_of` a realified holomorphic metric.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KFieldDef {
    #[serde(default)]
    pub chart: Option<String>,
    #[serde(default)]
    pub components: Option<Vec<String>>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub involution_of: Option<String>,
    #[serde(default)]
    pub complex_structure_of: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolomorphicDef {
    pub coords: Vec<String>,
    pub components: Vec<String>,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default)]
    pub zz_bound: Option<f64>,
}

fn default_half_width() -> f64 {
    0.5
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianDef {
    /// Ascending coefficients of `f`.
    pub coeffs: Vec<f64>,
    pub n: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PlanDef {
    pub count: usize,
    /// Falls back to the workspace seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PairCase {
    Product,
    Complex,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CheckDef {
    Einstein {
        metric: String,
        plan: String,
        gamma: Option<f64>,
        name: Option<String>,
    },
    Structural {
        metric: String,
        plan: String,
        name: Option<String>,
    },
    ProductEinstein {
        metric: String,
        plan: String,
        name: Option<String>,
    },
    Decomposable {
        metric: String,
        plan: String,
        name: Option<String>,
    },
    KahlerLike {
        metric: String,
        k_field: String,
        plan: String,
        name: Option<String>,
    },
    PsiSymmetry {
        metric: String,
        k_field: String,
        plan: String,
        name: Option<String>,
    },
    CurvatureIdentities {
        metric: String,
        k_field: String,
        plan: String,
        name: Option<String>,
    },
    RicciTwin {
        metric: String,
        k_field: String,
        plan: String,
        name: Option<String>,
    },
    Palatini {
        metric: String,
        k_field: String,
        lagrangian: String,
        root: f64,
        plan: String,
        scale: Option<f64>,
        name: Option<String>,
    },
    ComplexEinstein {
        holomorphic: String,
        plan: String,
        gamma: Option<f64>,
        name: Option<String>,
    },
    AntiKahler {
        holomorphic: String,
        plan: String,
        name: Option<String>,
    },
    Roots {
        lagrangian: String,
        name: Option<String>,
    },
    /// Random pairs `h = RᵗD_hR`, `g = RᵗD_gR` with `cond(R)` log-uniform in
    /// `[1, max_condition]`.
    Congruence {
        case: PairCase,
        count: usize,
        dims: Vec<usize>,
        max_condition: f64,
        seed: Option<u64>,
        name: Option<String>,
    },
}

impl CheckDef {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckDef::Einstein { .. } => "einstein",
            CheckDef::Structural { .. } => "structural",
            CheckDef::ProductEinstein { .. } => "product-einstein",
            CheckDef::Decomposable { .. } => "decomposable",
            CheckDef::KahlerLike { .. } => "kahler-like",
            CheckDef::PsiSymmetry { .. } => "psi-symmetry",
            CheckDef::CurvatureIdentities { .. } => "curvature-identities",
            CheckDef::RicciTwin { .. } => "ricci-twin",
            CheckDef::Palatini { .. } => "palatini",
            CheckDef::ComplexEinstein { .. } => "complex-einstein",
            CheckDef::AntiKahler { .. } => "anti-kahler",
            CheckDef::Roots { .. } => "roots",
            CheckDef::Congruence { .. } => "congruence",
        }
    }

    /// Explicit name, or `kind:subject`.
    pub fn name(&self) -> String {
        let (explicit, subject) = match self {
            CheckDef::Einstein { name, metric, .. }
            | CheckDef::Structural { name, metric, .. }
            | CheckDef::ProductEinstein { name, metric, .. }
            | CheckDef::Decomposable { name, metric, .. }
            | CheckDef::KahlerLike { name, metric, .. }
            | CheckDef::PsiSymmetry { name, metric, .. }
            | CheckDef::CurvatureIdentities { name, metric, .. }
            | CheckDef::RicciTwin { name, metric, .. }
            | CheckDef::Palatini { name, metric, .. } => (name, metric.clone()),
            CheckDef::ComplexEinstein { name, holomorphic, .. } | CheckDef::AntiKahler { name, holomorphic, .. } => {
                (name, holomorphic.clone())
            }
            CheckDef::Roots { name, lagrangian } => (name, lagrangian.clone()),
            CheckDef::Congruence { name, case, .. } => {
                (name, if *case == PairCase::Product { "product" } else { "complex" }.to_string())
            }
        };
        explicit.clone().unwrap_or_else(|| format!("{}:{subject}", self.kind()))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteDef {
    pub checks: Vec<CheckDef>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub charts: BTreeMap<String, ChartDef>,
    #[serde(default)]
    pub metrics: BTreeMap<String, MetricDef>,
    #[serde(default)]
    pub k_fields: BTreeMap<String, KFieldDef>,
    #[serde(default)]
    pub holomorphic_metrics: BTreeMap<String, HolomorphicDef>,
    #[serde(default)]
    pub lagrangians: BTreeMap<String, LagrangianDef>,
    #[serde(default)]
    pub plans: BTreeMap<String, PlanDef>,
    #[serde(default)]
    pub suites: BTreeMap<String, SuiteDef>,
}

/// Named tolerances with their defaults.
pub const TOLERANCES: &[(&str, f64)] = &[
    ("reconstruction", 1e-9),
    ("root", 1e-9),
    ("einstein", 1e-8),
    ("structural", 1e-9),
    ("identity", 1e-8),
    ("holomorphy", 1e-9),
    ("route", 1e-7),
    ("palatini", 1e-7),
    ("round-trip-metric", 1e-9),
    ("round-trip-connection", 1e-8),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        match self.0.get_mut(name) {
            Some(slot) if value.is_finite() && value > 0.0 => {
                *slot = value;
                Ok(())
            }
            Some(_) => Err(ConfigError::Invalid {
                section: "tolerances",
                name: name.into(),
                message: format!("must be positive and finite, got {value}"),
            }),
            None => Err(ConfigError::UnknownTolerance(name.into())),
        }
    }

    /// Applies `NAME=VALUE` overrides.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), ConfigError> {
        for o in overrides {
            let (name, value) = o.split_once('=').ok_or_else(|| ConfigError::ToleranceSyntax(o.clone()))?;
            let value: f64 = value.trim().parse().map_err(|_| ConfigError::ToleranceSyntax(o.clone()))?;
            self.set(name.trim(), value)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ResolvedMetric {
    pub field: MetricField,
    /// Present for metrics built from two factors.
    pub product: Option<ProductSpec>,
    /// The holomorphic metric this one realifies; its plans honour the
    /// holomorphic sampling bounds.
    pub realifies: Option<String>,
}

/// A fully resolved workspace: every cross-reference checked and every
/// expression parsed.
#[derive(Clone, Debug)]
pub struct WorkspaceConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub charts: BTreeMap<String, ChartSpec>,
    pub metrics: BTreeMap<String, ResolvedMetric>,
    pub k_fields: BTreeMap<String, KField>,
    pub holomorphic: BTreeMap<String, HolomorphicMetricField>,
    pub lagrangians: BTreeMap<String, LagrangianSpec>,
    pub plans: BTreeMap<String, PlanDef>,
    pub suites: BTreeMap<String, SuiteDef>,
}

fn invalid(section: &'static str, name: &str, message: impl ToString) -> ConfigError {
    ConfigError::Invalid { section, name: name.to_string(), message: message.to_string() }
}

fn lookup<'a, T>(
    map: &'a BTreeMap<String, T>,
    section: &'static str,
    name: &str,
    target: &'static str,
    key: &str,
) -> Result<&'a T, ConfigError> {
    map.get(key).ok_or_else(|| ConfigError::Unresolved { section, name: name.into(), target, missing: key.into() })
}

impl WorkspaceConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Self::resolve(toml::from_str(text)?)
    }

    pub fn resolve(raw: RawConfig) -> Result<Self, ConfigError> {
        let mut seen = BTreeSet::new();
        let names = raw
            .charts
            .keys()
            .chain(raw.metrics.keys())
            .chain(raw.k_fields.keys())
            .chain(raw.holomorphic_metrics.keys())
            .chain(raw.lagrangians.keys())
            .chain(raw.plans.keys())
            .chain(raw.suites.keys());
        for name in names {
            if !seen.insert(name.clone()) {
                return Err(ConfigError::Duplicate(name.clone()));
            }
        }

        let mut tolerances = Tolerances::default();
        for (k, &v) in &raw.tolerances {
            tolerances.set(k, v)?;
        }

        let mut charts = BTreeMap::new();
        for (name, def) in &raw.charts {
            let coords: Vec<&str> = def.coords.iter().map(String::as_str).collect();
            let mut chart = ChartSpec::new(name.clone(), &coords).map_err(|e| invalid("chart", name, e))?;
            if let Some(domain) = &def.domain {
                chart = chart
                    .with_domain(domain.iter().map(|d| (d[0], d[1])).collect())
                    .map_err(|e| invalid("chart", name, e))?;
            }
            charts.insert(name.clone(), chart);
        }

        let mut holomorphic = BTreeMap::new();
        for (name, def) in &raw.holomorphic_metrics {
            let coords: Vec<&str> = def.coords.iter().map(String::as_str).collect();
            let texts: Vec<&str> = def.components.iter().map(String::as_str).collect();
            let g = HolomorphicMetricField::parse(&coords, &texts)
                .map_err(|e| invalid("holomorphic metric", name, e))?
                .with_sampling(def.half_width, def.zz_bound);
            holomorphic.insert(name.clone(), g);
        }

        let metrics = resolve_metrics(&raw.metrics, &charts, &holomorphic)?;

        let mut k_fields = BTreeMap::new();
        for (name, def) in &raw.k_fields {
            k_fields.insert(name.clone(), resolve_k(name, def, &charts, &metrics, &holomorphic)?);
        }

        let mut lagrangians = BTreeMap::new();
        for (name, def) in &raw.lagrangians {
            let spec = LagrangianSpec::new(def.coeffs.clone(), def.n).map_err(|e| invalid("lagrangian", name, e))?;
            lagrangians.insert(name.clone(), spec);
        }

        for (name, plan) in &raw.plans {
            if plan.count == 0 {
                return Err(invalid("plan", name, "count must be positive"));
            }
        }

        let config = Self {
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            tolerances,
            charts,
            metrics,
            k_fields,
            holomorphic,
            lagrangians,
            plans: raw.plans,
            suites: raw.suites,
        };
        config.check_suites()?;
        Ok(config)
    }

    fn check_suites(&self) -> Result<(), ConfigError> {
        for (suite, def) in &self.suites {
            let mut names = BTreeSet::new();
            for check in &def.checks {
                let name = check.name();
                if !names.insert(name.clone()) {
                    return Err(invalid("suite", suite, format!("check name `{name}` repeats")));
                }
                let need = |map_has: bool, target: &'static str, key: &str| {
                    if map_has {
                        Ok(())
                    } else {
                        Err(ConfigError::Unresolved {
                            section: "suite",
                            name: suite.clone(),
                            target,
                            missing: key.into(),
                        })
                    }
                };
                let metric = |m: &str| need(self.metrics.contains_key(m), "metric", m);
                let k = |m: &str| need(self.k_fields.contains_key(m), "k-field", m);
                let plan = |m: &str| need(self.plans.contains_key(m), "plan", m);
                let holo = |m: &str| need(self.holomorphic.contains_key(m), "holomorphic metric", m);
                let lag = |m: &str| need(self.lagrangians.contains_key(m), "lagrangian", m);
                match check {
                    CheckDef::Einstein { metric: m, plan: p, .. }
                    | CheckDef::Structural { metric: m, plan: p, .. }
                    | CheckDef::ProductEinstein { metric: m, plan: p, .. }
                    | CheckDef::Decomposable { metric: m, plan: p, .. } => {
                        metric(m)?;
                        plan(p)?;
                        if matches!(check, CheckDef::ProductEinstein { .. } | CheckDef::Decomposable { .. })
                            && self.metrics[m].product.is_none()
                        {
                            return Err(invalid("suite", suite, format!("`{name}` needs a metric built from factors")));
                        }
                    }
                    CheckDef::KahlerLike { metric: m, k_field, plan: p, .. }
                    | CheckDef::PsiSymmetry { metric: m, k_field, plan: p, .. }
                    | CheckDef::CurvatureIdentities { metric: m, k_field, plan: p, .. }
                    | CheckDef::RicciTwin { metric: m, k_field, plan: p, .. } => {
                        metric(m)?;
                        k(k_field)?;
                        plan(p)?;
                    }
                    CheckDef::Palatini { metric: m, k_field, lagrangian, plan: p, .. } => {
                        metric(m)?;
                        k(k_field)?;
                        lag(lagrangian)?;
                        plan(p)?;
                    }
                    CheckDef::ComplexEinstein { holomorphic, plan: p, .. }
                    | CheckDef::AntiKahler { holomorphic, plan: p, .. } => {
                        holo(holomorphic)?;
                        plan(p)?;
                    }
                    CheckDef::Roots { lagrangian, .. } => lag(lagrangian)?,
                    CheckDef::Congruence { case, count, dims, max_condition, .. } => {
                        let bad_dim = dims.iter().any(|&n| n == 0 || (*case == PairCase::Complex && n % 2 == 1));
                        if *count == 0
                            || dims.is_empty()
                            || bad_dim
                            || !max_condition.is_finite()
                            || *max_condition < 1.0
                        {
                            return Err(invalid("suite", suite, format!("`{name}` has an invalid pair distribution")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn suite(&self, name: &str) -> Result<&SuiteDef, ConfigError> {
        self.suites.get(name).ok_or_else(|| ConfigError::UnknownSuite(name.into()))
    }

    pub fn plan_seed(&self, plan: &PlanDef) -> u64 {
        plan.seed.unwrap_or(self.seed)
    }
}

fn resolve_metrics(
    defs: &BTreeMap<String, MetricDef>,
    charts: &BTreeMap<String, ChartSpec>,
    holomorphic: &BTreeMap<String, HolomorphicMetricField>,
) -> Result<BTreeMap<String, ResolvedMetric>, ConfigError> {
    // factors may refer to other metrics, so resolve until a fixed point
    let mut out: BTreeMap<String, ResolvedMetric> = BTreeMap::new();
    let mut pending: Vec<&String> = defs.keys().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut still = Vec::new();
        for name in pending {
            let def = &defs[name];
            if let Some([a, b]) = &def.factors {
                for f in [a, b] {
                    if !defs.contains_key(f) {
                        return Err(ConfigError::Unresolved {
                            section: "metric",
                            name: name.clone(),
                            target: "metric",
                            missing: f.clone(),
                        });
                    }
                }
                if !(out.contains_key(a) && out.contains_key(b)) {
                    still.push(name);
                    continue;
                }
            }
            out.insert(name.clone(), resolve_metric(name, def, charts, holomorphic, &out)?);
        }
        if still.len() == before {
            return Err(invalid("metric", still[0], "factors form a cycle"));
        }
        pending = still;
    }
    Ok(out)
}

fn resolve_metric(
    name: &str,
    def: &MetricDef,
    charts: &BTreeMap<String, ChartSpec>,
    holomorphic: &BTreeMap<String, HolomorphicMetricField>,
    done: &BTreeMap<String, ResolvedMetric>,
) -> Result<ResolvedMetric, ConfigError> {
    let given = [def.components.is_some(), def.diagonal.is_some(), def.factors.is_some(), def.realified.is_some()];
    if given.iter().filter(|&&b| b).count() != 1 {
        return Err(invalid("metric", name, "give exactly one of components, diagonal, factors, realified"));
    }
    if def.warp.is_some() && def.factors.is_none() {
        return Err(invalid("metric", name, "warp needs factors"));
    }
    let chart = || -> Result<ChartSpec, ConfigError> {
        let key = def.chart.as_deref().ok_or_else(|| invalid("metric", name, "chart is required"))?;
        Ok(lookup(charts, "metric", name, "chart", key)?.clone())
    };
    let texts = |v: &[String]| v.iter().map(String::clone).collect::<Vec<_>>();
    if let Some(c) = &def.components {
        let t = texts(c);
        let refs: Vec<&str> = t.iter().map(String::as_str).collect();
        let field = MetricField::parse(chart()?, &refs).map_err(|e| invalid("metric", name, e))?;
        return Ok(ResolvedMetric { field, product: None, realifies: None });
    }
    if let Some(d) = &def.diagonal {
        let t = texts(d);
        let refs: Vec<&str> = t.iter().map(String::as_str).collect();
        let field = MetricField::diagonal(chart()?, &refs).map_err(|e| invalid("metric", name, e))?;
        return Ok(ResolvedMetric { field, product: None, realifies: None });
    }
    if let Some(h) = &def.realified {
        if def.chart.is_some() {
            return Err(invalid("metric", name, "a realified metric takes its chart from the holomorphic metric"));
        }
        let g = lookup(holomorphic, "metric", name, "holomorphic metric", h)?;
        let real = realify_unchecked(g).map_err(|e| invalid("metric", name, e))?;
        return Ok(ResolvedMetric { field: real.metric, product: None, realifies: Some(h.clone()) });
    }
    let [a, b] = def.factors.as_ref().expect("one variant is present");
    if def.chart.is_some() {
        return Err(invalid("metric", name, "a product takes its chart from its factors"));
    }
    let spec =
        ProductSpec::new(done[a].field.clone(), done[b].field.clone()).map_err(|e| invalid("metric", name, e))?;
    let (field, spec) = match &def.warp {
        Some(theta) => {
            let spec = spec.with_warp_text(theta).map_err(|e| invalid("metric", name, e))?;
            (build_warped(&spec).map_err(|e| invalid("metric", name, e))?, spec)
        }
        None => (build_product(&spec).map_err(|e| invalid("metric", name, e))?.0, spec),
    };
    Ok(ResolvedMetric { field, product: Some(spec), realifies: None })
}

fn resolve_k(
    name: &str,
    def: &KFieldDef,
    charts: &BTreeMap<String, ChartSpec>,
    metrics: &BTreeMap<String, ResolvedMetric>,
    holomorphic: &BTreeMap<String, HolomorphicMetricField>,
) -> Result<KField, ConfigError> {
    let given = [def.components.is_some(), def.involution_of.is_some(), def.complex_structure_of.is_some()];
    if given.iter().filter(|&&b| b).count() != 1 {
        return Err(invalid("k-field", name, "give exactly one of components, involution_of, complex_structure_of"));
    }
    if let Some(m) = &def.involution_of {
        let metric = lookup(metrics, "k-field", name, "metric", m)?;
        let spec = metric
            .product
            .as_ref()
            .ok_or_else(|| invalid("k-field", name, format!("`{m}` is not built from factors")))?;
        return block_involution(metric.field.chart(), spec.k()).map_err(|e| invalid("k-field", name, e));
    }
    if let Some(h) = &def.complex_structure_of {
        let g = lookup(holomorphic, "k-field", name, "holomorphic metric", h)?;
        return Ok(realify_unchecked(g).map_err(|e| invalid("k-field", name, e))?.j);
    }
    let key = def.chart.as_deref().ok_or_else(|| invalid("k-field", name, "chart is required"))?;
    let chart = lookup(charts, "k-field", name, "chart", key)?.clone();
    let (epsilon, sigma) = match (def.epsilon, def.sigma) {
        (Some(e), Some(s)) => (e, s),
        _ => return Err(invalid("k-field", name, "epsilon and sigma are required")),
    };
    let texts: Vec<&str> = def.components.as_ref().expect("checked above").iter().map(String::as_str).collect();
    KField::parse(chart, &texts, epsilon, sigma).map_err(|e| invalid("k-field", name, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
        [charts.plane]
        coords = ["x", "y"]
        domain = [[-1, 1], [-1, 1]]

        [metrics.flat]
        chart = "plane"
        diagonal = ["1", "1"]

        [plans.few]
        count = 4

        [suites.basic]
        checks = [{ kind = "einstein", metric = "flat", plan = "few" }]
    "#;

    #[test]
    fn resolves_a_small_workspace() {
        let c = WorkspaceConfig::from_toml(SMALL).unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.metrics["flat"].field.dim(), 2);
        assert_eq!(c.suite("basic").unwrap().checks[0].name(), "einstein:flat");
    }

    #[test]
    fn dangling_references_are_reported() {
        let text = SMALL.replace(r#"plan = "few""#, r#"plan = "many""#);
        match WorkspaceConfig::from_toml(&text) {
            Err(ConfigError::Unresolved { target, missing, .. }) => {
                assert_eq!((target, missing.as_str()), ("plan", "many"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn names_are_unique_across_sections() {
        let text = format!("{SMALL}\n[lagrangians.flat]\ncoeffs = [1, 1]\nn = 4\n");
        assert!(matches!(WorkspaceConfig::from_toml(&text), Err(ConfigError::Duplicate(n)) if n == "flat"));
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.apply_overrides(&["einstein=1e-6".into()]).unwrap();
        assert_eq!(t.get("einstein"), 1e-6);
        assert!(matches!(t.apply_overrides(&["nope=1".into()]), Err(ConfigError::UnknownTolerance(_))));
        assert!(matches!(t.apply_overrides(&["einstein".into()]), Err(ConfigError::ToleranceSyntax(_))));
        assert!(t.set("einstein", -1.0).is_err());
    }
}
