//! Evaluation of suite checks into report entries.

use std::error::Error;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twinmetric::antikahler::{
    antihermitian_block_check, complex_einstein_check, holomorphy_check, mixed_christoffel_check, realify_unchecked,
};
use twinmetric::fixtures::{random_complex_pair, random_product_pair};
use twinmetric::matrix::{signature, simultaneous_congruence, SymMatrix};
use twinmetric::palatini::{assemble, round_trip_check, verify_euler_lagrange, PalatiniError};
use twinmetric::product::{block_involution, einstein_product_criterion};
use twinmetric::roots::{classify_roots, LagrangianSpec};
use twinmetric::tensor::{
    curvature_k_identities, einstein_residual, kahler_like_check, psi_symmetry_check, ricci_twin_check,
    structural_residuals, SamplePlan,
};

use crate::config::{CheckDef, PairCase, PlanDef, WorkspaceConfig};
use crate::report::{ReportEntry, Status};

type BoxError = Box<dyn Error + Send + Sync>;

/// Runs one check. Failures to evaluate become `error` entries rather than
/// aborting the suite.
pub fn run_check(cfg: &WorkspaceConfig, check: &CheckDef, timings: bool) -> ReportEntry {
    let start = Instant::now();
    let mut entry = ReportEntry::new(check.name(), check.kind());
    if let Err(e) = evaluate(cfg, check, &mut entry) {
        entry.status = Status::Error;
        entry.message = Some(e.to_string());
    }
    if timings {
        entry.wall_time = Some(start.elapsed().as_secs_f64().into());
    }
    entry
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn plan_def<'a>(cfg: &'a WorkspaceConfig, name: &str) -> &'a PlanDef {
    &cfg.plans[name]
}

/// A plan on the metric's chart; realified metrics sample through their
/// holomorphic source so its `|z·z|` bound is honoured.
fn metric_plan(
    cfg: &WorkspaceConfig,
    metric: &str,
    plan: &str,
    entry: &mut ReportEntry,
) -> Result<SamplePlan, BoxError> {
    let def = plan_def(cfg, plan);
    let seed = cfg.plan_seed(def);
    let m = &cfg.metrics[metric];
    let plan = match &m.realifies {
        Some(h) => cfg.holomorphic[h].sample_plan(def.count, seed)?,
        None => SamplePlan::halton(m.field.chart(), def.count, seed)?,
    };
    entry.seed = Some(seed);
    entry.points = Some(plan.len());
    Ok(plan)
}

fn holo_plan(cfg: &WorkspaceConfig, holo: &str, plan: &str, entry: &mut ReportEntry) -> Result<SamplePlan, BoxError> {
    let def = plan_def(cfg, plan);
    let seed = cfg.plan_seed(def);
    let plan = cfg.holomorphic[holo].sample_plan(def.count, seed)?;
    entry.seed = Some(seed);
    entry.points = Some(plan.len());
    Ok(plan)
}

fn evaluate(cfg: &WorkspaceConfig, check: &CheckDef, e: &mut ReportEntry) -> Result<(), BoxError> {
    let tol = |name: &str| cfg.tolerances.get(name);
    match check {
        CheckDef::Einstein { metric, plan, gamma, .. } => {
            let plan = metric_plan(cfg, metric, plan, e)?;
            let fit = einstein_residual(&cfg.metrics[metric].field, &plan)?;
            let t = tol("einstein");
            e.residual("einstein", fit.max_residual).tolerance("einstein", t).value("gamma", fit.gamma);
            let mut ok = fit.max_residual <= t;
            if let Some(expected) = gamma {
                let gap = (fit.gamma - expected).abs();
                e.residual("gamma", gap).tolerance("gamma", t).value("gamma_expected", *expected);
                ok &= gap <= t;
            }
            e.status = verdict(ok);
        }
        CheckDef::Structural { metric, plan, .. } => {
            let plan = metric_plan(cfg, metric, plan, e)?;
            let r = structural_residuals(&cfg.metrics[metric].field, &plan)?;
            let t = tol("structural");
            for (k, v) in [
                ("torsion", r.torsion),
                ("metricity", r.metricity),
                ("density_metricity", r.density_metricity),
                ("bianchi", r.bianchi),
            ] {
                e.residual(k, v).tolerance(k, t);
            }
            e.status = verdict(r.max() <= t);
        }
        CheckDef::ProductEinstein { metric, plan, .. } => {
            let plan = metric_plan(cfg, metric, plan, e)?;
            let spec = cfg.metrics[metric].product.as_ref().expect("validated as a product");
            let t = tol("einstein");
            let r = einstein_product_criterion(spec, &plan, t)?;
            e.tolerance("einstein", t)
                .value("factor1_gamma", r.factor1.gamma)
                .value("factor1_residual", r.factor1.max_residual)
                .value("factor2_gamma", r.factor2.gamma)
                .value("factor2_residual", r.factor2.max_residual)
                .value("joint_gamma", r.joint.gamma)
                .value("joint_residual", r.joint.max_residual)
                .value("factors_agree", f64::from(u8::from(r.factors_agree)))
                .value("joint_einstein", f64::from(u8::from(r.joint_einstein)));
            e.message = Some(format!(
                "product is {}Einstein; factors {}",
                if r.joint_einstein { "" } else { "not " },
                if r.factors_agree { "agree" } else { "disagree" }
            ));
            e.status = verdict(r.consistent());
        }
        CheckDef::Decomposable { metric, plan, .. } => {
            let plan = metric_plan(cfg, metric, plan, e)?;
            let m = &cfg.metrics[metric];
            let spec = m.product.as_ref().expect("validated as a product");
            let p = block_involution(m.field.chart(), spec.k())?;
            kahler_like(e, &m.field, &p, &plan, tol("identity"))?;
        }
        CheckDef::KahlerLike { metric, k_field, plan, .. } => {
            let plan = metric_plan(cfg, metric, plan, e)?;
            kahler_like(e, &cfg.metrics[metric].field, &cfg.k_fields[k_field], &plan, tol("identity"))?;
        }
        CheckDef::PsiSymmetry { metric, k_field, plan, .. } => {
            let plan = metric_plan(cfg, metric, plan, e)?;
            let r = psi_symmetry_check(&cfg.metrics[metric].field, &cfg.k_fields[k_field], &plan)?;
            let t = tol("identity");
            e.residual("k_pair", r.k_pair).tolerance("k_pair", t);
            e.residual("swap", r.swap).tolerance("swap", t).value("max_psi_norm", r.max_norm);
            e.status = verdict(r.k_pair <= t && r.swap <= t);
        }
        CheckDef::CurvatureIdentities { metric, k_field, plan, .. } => {
            let plan = metric_plan(cfg, metric, plan, e)?;
            let t = tol("identity");
            let r = curvature_k_identities(&cfg.metrics[metric].field, &cfg.k_fields[k_field], &plan, t)?;
            for (k, v) in [
                ("commutation", r.commutation),
                ("k_invariance", r.k_invariance),
                ("ricci_invariance", r.ricci_invariance),
                ("trace_identity", r.trace_identity),
            ] {
                e.residual(k, v).tolerance(k, t);
            }
            e.status = verdict(r.max() <= t);
        }
        CheckDef::RicciTwin { metric, k_field, plan, .. } => {
            let plan = metric_plan(cfg, metric, plan, e)?;
            let t = tol("identity");
            let r = ricci_twin_check(&cfg.metrics[metric].field, &cfg.k_fields[k_field], &plan, t)?;
            let proportional = r.max_residual <= t;
            let einstein = r.einstein.max_residual <= tol("einstein");
            e.value("ricci_twin_residual", r.max_residual)
                .value("lambda", r.lambda)
                .value("einstein_residual", r.einstein.max_residual)
                .value("gamma", r.einstein.gamma)
                .tolerance("identity", t)
                .tolerance("einstein", tol("einstein"));
            e.message = Some(format!(
                "Ricci twin is {}proportional to h; metric is {}Einstein",
                if proportional { "" } else { "not " },
                if einstein { "" } else { "not " }
            ));
            e.status = verdict(proportional == einstein);
        }
        CheckDef::Palatini { metric, k_field, lagrangian, root, plan, scale, .. } => {
            let plan = metric_plan(cfg, metric, plan, e)?;
            let g = &cfg.metrics[metric].field;
            let spec = &cfg.lagrangians[lagrangian];
            e.value("root", *root);
            let sol = match assemble(g, &cfg.k_fields[k_field], spec, *root, &plan) {
                Ok(sol) => sol,
                Err(err @ (PalatiniError::Tensor(_) | PalatiniError::TwoFormTwin)) => return Err(err.into()),
                Err(err) => {
                    e.status = Status::Fail;
                    e.message = Some(err.to_string());
                    return Ok(());
                }
            };
            let sol = match scale {
                Some(s) => sol.with_scale(*s),
                None => sol,
            };
            let v = verify_euler_lagrange(&sol, &plan)?;
            let rt = round_trip_check(&sol, &plan)?;
            let t = tol("palatini");
            for (k, x) in [
                ("field_equation", v.field_equation),
                ("connection_equation", v.connection_equation),
                ("scalar", v.scalar),
                ("regularity", v.regularity),
            ] {
                e.residual(k, x).tolerance(k, t);
            }
            let (tm, tc) = (tol("round-trip-metric"), tol("round-trip-connection"));
            e.residual("round_trip_metric", rt.metric).tolerance("round_trip_metric", tm);
            e.residual("round_trip_connection", rt.connection).tolerance("round_trip_connection", tc);
            e.value("epsilon", sol.epsilon).value("scale", sol.scale).value("gamma", sol.fit.gamma);
            e.status = verdict(v.passes(t) && rt.metric <= tm && rt.connection <= tc);
        }
        CheckDef::ComplexEinstein { holomorphic, plan, gamma, .. } => {
            let plan = holo_plan(cfg, holomorphic, plan, e)?;
            let r = complex_einstein_check(&cfg.holomorphic[holomorphic], &plan)?;
            let (te, tr) = (tol("einstein"), tol("route"));
            e.residual("complex_einstein", r.max_residual).tolerance("complex_einstein", te);
            e.residual("real_einstein", r.real.max_residual).tolerance("real_einstein", te);
            e.residual("route_gap", r.route_gap).tolerance("route_gap", tr);
            e.value("gamma_re", r.gamma.re).value("gamma_im", r.gamma.im).value("real_gamma", r.real.gamma);
            let mut ok = r.max_residual <= te && r.real.max_residual <= te && r.route_gap <= tr;
            if let Some(expected) = gamma {
                let gap = (r.gamma.re - expected).abs().max(r.gamma.im.abs());
                e.residual("gamma", gap).tolerance("gamma", te).value("gamma_expected", *expected);
                ok &= gap <= te;
            }
            e.status = verdict(ok);
        }
        CheckDef::AntiKahler { holomorphic, plan, .. } => {
            let plan = holo_plan(cfg, holomorphic, plan, e)?;
            let g = &cfg.holomorphic[holomorphic];
            let (th, ti) = (tol("holomorphy"), tol("identity"));
            let hol = holomorphy_check(g, &plan)?;
            let real = realify_unchecked(g)?;
            let kl = kahler_like_check(&real.metric, &real.j, &plan, ti)?;
            let blocks = antihermitian_block_check(&real.metric, &real.j, &plan)?;
            let m = g.m();
            let mut wrong_signature = 0usize;
            for p in plan.points() {
                let s = SymMatrix::from_row_slice(2 * m, &real.metric.values(p)?)?;
                if signature(&s)? != (m, m) {
                    wrong_signature += 1;
                }
            }
            e.residual("holomorphy", hol.max()).tolerance("holomorphy", th);
            for (k, v) in [
                ("nabla_j", kl.max_nabla_k),
                ("nijenhuis", kl.max_nijenhuis),
                ("metric_mixed_block", blocks.metric_mixed),
                ("ricci_mixed_block", blocks.ricci_mixed),
            ] {
                e.residual(k, v).tolerance(k, ti);
            }
            // the complex frame needs holomorphic derivatives
            if hol.max() <= th {
                let frame = mixed_christoffel_check(g, &plan)?;
                e.residual("mixed_christoffel", frame.mixed).tolerance("mixed_christoffel", ti);
                e.residual("frame_gap", frame.frame_gap).tolerance("frame_gap", ti);
            } else {
                e.message = Some("not holomorphic; complex frame check skipped".into());
            }
            e.value("signature_mismatches", wrong_signature as f64);
            let ok =
                hol.max() <= th && e.residuals.iter().all(|(k, v)| v.0 <= e.tolerances[k].0) && wrong_signature == 0;
            e.status = verdict(ok);
        }
        CheckDef::Roots { lagrangian, .. } => roots(e, &cfg.lagrangians[lagrangian], tol("root")),
        CheckDef::Congruence { case, count, dims, max_condition, seed, .. } => {
            let seed = seed.unwrap_or(cfg.seed);
            e.seed = Some(seed);
            congruence(e, *case, *count, dims, *max_condition, seed, tol("reconstruction"));
        }
    }
    Ok(())
}

fn kahler_like(
    e: &mut ReportEntry,
    g: &twinmetric::tensor::MetricField,
    k: &twinmetric::tensor::KField,
    plan: &SamplePlan,
    t: f64,
) -> Result<(), BoxError> {
    let r = kahler_like_check(g, k, plan, t)?;
    e.residual("nabla_k", r.max_nabla_k).tolerance("nabla_k", t);
    e.residual("nijenhuis", r.max_nijenhuis).tolerance("nijenhuis", t);
    e.status = verdict(r.passed && r.consistent(t));
    Ok(())
}

/// Relative gap between `c/n` and `f(c)/(4f′(c))`.
pub fn epsilon_agreement(spec: &LagrangianSpec, c: f64, epsilon: f64) -> f64 {
    let by_ratio = spec.f(c) / (4.0 * spec.f_prime(c));
    let scale = epsilon.abs().max(by_ratio.abs());
    if scale == 0.0 {
        0.0
    } else {
        (by_ratio - epsilon).abs() / scale
    }
}

fn roots(e: &mut ReportEntry, spec: &LagrangianSpec, t: f64) {
    let report = classify_roots(spec);
    e.value("root_count", report.roots.len() as f64);
    e.value("admissible_count", report.admissible().count() as f64);
    if report.identically_degenerate {
        e.status = Status::Fail;
        e.message = Some("φ vanishes identically; no root is isolated".into());
        return;
    }
    let mut worst = 0.0f64;
    for (i, r) in report.roots.iter().enumerate() {
        e.value(&format!("root{i}.c"), r.c)
            .value(&format!("root{i}.epsilon"), r.epsilon)
            .value(&format!("root{i}.multiplicity"), r.multiplicity as f64)
            .value(&format!("root{i}.admissible"), f64::from(u8::from(r.admissible)));
        if r.admissible {
            worst = worst.max(epsilon_agreement(spec, r.c, r.epsilon));
        }
    }
    e.residual("epsilon_agreement", worst).tolerance("epsilon_agreement", t);
    let any = report.admissible().next().is_some();
    if !any {
        e.message = Some("no admissible root".into());
    }
    e.status = verdict(any && worst <= t);
}

/// Outcome of a randomized congruence run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CongruenceStats {
    pub pairs: usize,
    pub worst_residual: f64,
    pub worst_takagi: f64,
    pub canonical_mismatches: usize,
    pub errors: usize,
}

pub fn congruence_suite(
    case: PairCase,
    count: usize,
    dims: &[usize],
    max_condition: f64,
    seed: u64,
) -> CongruenceStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = CongruenceStats { pairs: count, ..Default::default() };
    let log_max = max_condition.log10();
    for i in 0..count {
        let n = dims[i % dims.len()];
        let cond = 10f64.powf(rng.gen_range(0.0..=log_max));
        let pair = match case {
            PairCase::Product => random_product_pair(&mut rng, n, cond),
            PairCase::Complex => random_complex_pair(&mut rng, n, cond),
        };
        match simultaneous_congruence(&pair.h, &pair.g) {
            Ok(d) => {
                let (rh, rg) = d.residuals(&pair.h, &pair.g);
                stats.worst_residual = stats.worst_residual.max(rh).max(rg);
                if let Some(t) = d.internals.takagi_residual {
                    stats.worst_takagi = stats.worst_takagi.max(t);
                }
                let canonical = match case {
                    PairCase::Product => d.k == pair.k,
                    PairCase::Complex => d.d_h == pair.d_h && d.d_g == pair.d_g,
                };
                if !canonical {
                    stats.canonical_mismatches += 1;
                }
            }
            Err(_) => stats.errors += 1,
        }
    }
    stats
}

fn congruence(
    e: &mut ReportEntry,
    case: PairCase,
    count: usize,
    dims: &[usize],
    max_condition: f64,
    seed: u64,
    t: f64,
) {
    let s = congruence_suite(case, count, dims, max_condition, seed);
    e.points = Some(s.pairs);
    e.residual("reconstruction", s.worst_residual).tolerance("reconstruction", t);
    if case == PairCase::Complex {
        e.residual("takagi", s.worst_takagi).tolerance("takagi", t);
    }
    e.value("canonical_mismatches", s.canonical_mismatches as f64).value("errors", s.errors as f64);
    e.status = verdict(s.worst_residual <= t && s.worst_takagi <= t && s.canonical_mismatches == 0 && s.errors == 0);
}
