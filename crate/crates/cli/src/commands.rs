//! Verbs of the `twinmetric` tool and their exit codes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use twinmetric::antikahler::{holomorphy_check, realify_unchecked};
use twinmetric::matrix::{simultaneous_congruence, CongruenceCase, SymMatrix};
use twinmetric::roots::classify_roots;
use twinmetric::tensor::DEFAULT_COUNT;

use crate::checks::{epsilon_agreement, run_check};
use crate::config::{Tolerances, WorkspaceConfig};
use crate::matrix_file::read_matrix;
use crate::report::{num_rows, to_structured, Num, ReportDocument};

pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAILURE: i32 = 1;
    /// The question has no answer for this input, e.g. no admissible root.
    pub const NON_RESULT: i32 = 2;
    pub const USAGE: i32 = 64;
    pub const INTERNAL: i32 = 70;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "twinmetric", version, about = "Twin metrics, K-structures and Palatini solutions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Workspace document (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the workspace seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Overrides a named tolerance; repeatable.
    #[arg(long = "tolerance", global = true, value_name = "NAME=VAL")]
    pub tolerances: Vec<String>,
    /// Writes the document here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Records wall time per check; reports are then no longer reproducible.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classifies the roots of f′(S)S − (n/4)f(S) for a named Lagrangian.
    Roots { lagrangian: String },
    /// Brings a matrix pair (h, g) to canonical form.
    Congruence { h: PathBuf, g: PathBuf },
    /// Runs a named suite of checks.
    Verify { suite: String },
    /// Prints the real metric and complex structure of a holomorphic metric.
    Realify {
        holomorphic: String,
        /// Sample points for the holomorphy check.
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        points: usize,
    },
    /// Re-renders a saved report document.
    Report { path: PathBuf },
}

/// What a run produced: an exit code, the document and diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: impl std::fmt::Display) -> Self {
        Self { code: exit::USAGE, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// Parses `args` (program name first) and runs the verb.
pub fn run_from_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            }
        }
    }
}

struct Rendered {
    code: i32,
    body: String,
}

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let rendered = match &cli.command {
        Command::Roots { lagrangian } => load(g).and_then(|cfg| cmd_roots(&cfg, lagrangian, g.format)),
        Command::Congruence { h, g: gf } => tolerances(g).and_then(|t| cmd_congruence(h, gf, &t, g.format)),
        Command::Verify { suite } => {
            load(g).and_then(|cfg| cmd_verify(&cfg, suite, g.timings).map(|doc| render_report(&doc, g.format)))
        }
        Command::Realify { holomorphic, points } => {
            load(g).and_then(|cfg| cmd_realify(&cfg, holomorphic, *points, g.format))
        }
        Command::Report { path } => cmd_report(path, g.format),
    };
    let rendered = match rendered {
        Ok(r) => r,
        Err(o) => return o,
    };
    match &g.out {
        Some(path) => match std::fs::write(path, &rendered.body) {
            Ok(()) => Outcome { code: rendered.code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome {
                code: exit::USAGE,
                stdout: String::new(),
                stderr: format!("error: cannot write `{}`: {e}\n", path.display()),
            },
        },
        None => Outcome { code: rendered.code, stdout: rendered.body, stderr: String::new() },
    }
}

fn tolerances(g: &GlobalArgs) -> Result<Tolerances, Outcome> {
    let mut t = Tolerances::default();
    t.apply_overrides(&g.tolerances).map_err(Outcome::usage)?;
    Ok(t)
}

/// Loads the workspace and applies the command-line overrides.
fn load(g: &GlobalArgs) -> Result<WorkspaceConfig, Outcome> {
    let path = g.config.as_ref().ok_or_else(|| Outcome::usage("this verb needs --config PATH"))?;
    let mut cfg = WorkspaceConfig::load(path).map_err(Outcome::usage)?;
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    cfg.tolerances.apply_overrides(&g.tolerances).map_err(Outcome::usage)?;
    Ok(cfg)
}

/// Runs every check of `suite`, in parallel, and assembles the sorted
/// document.
pub fn cmd_verify(cfg: &WorkspaceConfig, suite: &str, timings: bool) -> Result<ReportDocument, Outcome> {
    let def = cfg.suite(suite).map_err(Outcome::usage)?;
    let entries = std::thread::scope(|s| {
        let handles: Vec<_> = def.checks.iter().map(|c| s.spawn(move || run_check(cfg, c, timings))).collect();
        handles
            .into_iter()
            .zip(&def.checks)
            .map(|(h, c)| {
                h.join().unwrap_or_else(|_| {
                    let mut e = crate::report::ReportEntry::new(c.name(), c.kind());
                    e.status = crate::report::Status::Error;
                    e.message = Some("check panicked".into());
                    e
                })
            })
            .collect()
    });
    Ok(ReportDocument::new(suite, cfg.seed, entries))
}

pub fn report_exit_code(doc: &ReportDocument) -> i32 {
    if doc.any_error() {
        exit::INTERNAL
    } else if doc.passed {
        exit::PASS
    } else {
        exit::FAILURE
    }
}

fn render_report(doc: &ReportDocument, format: Format) -> Rendered {
    let body = match format {
        Format::Text => doc.to_text(),
        Format::Structured => to_structured(doc),
    };
    Rendered { code: report_exit_code(doc), body }
}

fn cmd_report(path: &Path, format: Format) -> Result<Rendered, Outcome> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Outcome::usage(format!("cannot read `{}`: {e}", path.display())))?;
    let doc: ReportDocument = serde_json::from_str(&text)
        .map_err(|e| Outcome::usage(format!("`{}` is not a report: {e}", path.display())))?;
    if doc.schema != crate::report::SCHEMA {
        return Err(Outcome::usage(format!("unsupported schema `{}`", doc.schema)));
    }
    Ok(render_report(&doc, format))
}

#[derive(Serialize)]
struct RootRow {
    c: Num,
    multiplicity: usize,
    f_prime: Num,
    epsilon: Num,
    epsilon_agreement: Option<Num>,
    admissible: bool,
    almost_tangent: bool,
}

#[derive(Serialize)]
struct RootsDocument {
    schema: &'static str,
    lagrangian: String,
    n: usize,
    coefficients: Vec<Num>,
    identically_degenerate: bool,
    roots: Vec<RootRow>,
}

fn cmd_roots(cfg: &WorkspaceConfig, name: &str, format: Format) -> Result<Rendered, Outcome> {
    let spec = cfg.lagrangians.get(name).ok_or_else(|| Outcome::usage(format!("no lagrangian named `{name}`")))?;
    let report = classify_roots(spec);
    let rows: Vec<RootRow> = report
        .roots
        .iter()
        .map(|r| RootRow {
            c: Num(r.c),
            multiplicity: r.multiplicity,
            f_prime: Num(r.f_prime_at_c),
            epsilon: Num(r.epsilon),
            epsilon_agreement: r.admissible.then(|| Num(epsilon_agreement(spec, r.c, r.epsilon))),
            admissible: r.admissible,
            almost_tangent: r.almost_tangent,
        })
        .collect();
    let code = if report.admissible().next().is_some() { exit::PASS } else { exit::NON_RESULT };
    let doc = RootsDocument {
        schema: "twinmetric-roots/1",
        lagrangian: name.into(),
        n: spec.n(),
        coefficients: spec.coeffs().iter().copied().map(Num).collect(),
        identically_degenerate: report.identically_degenerate,
        roots: rows,
    };
    let body = match format {
        Format::Structured => to_structured(&doc),
        Format::Text => {
            let mut out = format!("lagrangian {name} (n = {})\n", doc.n);
            if doc.identically_degenerate {
                out.push_str("f′(S)S − (n/4)f(S) vanishes identically: every S solves it and no root is isolated\n");
            } else if doc.roots.is_empty() {
                out.push_str("no real roots\n");
            }
            for r in &doc.roots {
                let tag = if r.admissible {
                    "admissible"
                } else if r.almost_tangent {
                    "almost tangent (ε = 0)"
                } else if r.multiplicity > 1 {
                    "repeated"
                } else {
                    "f′ vanishes"
                };
                out.push_str(&format!(
                    "S = {} multiplicity {} f′ = {} ε = {} {tag}\n",
                    r.c, r.multiplicity, r.f_prime, r.epsilon
                ));
            }
            if code == exit::NON_RESULT && !doc.identically_degenerate {
                out.push_str("no admissible root\n");
            }
            out
        }
    };
    Ok(Rendered { code, body })
}

#[derive(Serialize)]
struct CongruenceDocument {
    schema: &'static str,
    case: &'static str,
    n: usize,
    k: Option<usize>,
    r: Vec<Vec<Num>>,
    d_h: Vec<Vec<Num>>,
    d_g: Vec<Vec<Num>>,
    residual_h: Num,
    residual_g: Num,
    takagi_residual: Option<Num>,
    tolerance: Num,
    passed: bool,
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<Num>> {
    num_rows((0..m.nrows()).map(|i| m.row(i).iter().copied().collect()))
}

fn cmd_congruence(h: &Path, g: &Path, tol: &Tolerances, format: Format) -> Result<Rendered, Outcome> {
    let read = |p: &Path| {
        let m = read_matrix(p).map_err(|e| Outcome::usage(format!("{}: {e}", p.display())))?;
        SymMatrix::new(m).map_err(|e| Outcome::usage(format!("{}: {e}", p.display())))
    };
    let (hm, gm) = (read(h)?, read(g)?);
    if hm.n() != gm.n() {
        return Err(Outcome::usage(format!("h is {0}×{0} but g is {1}×{1}", hm.n(), gm.n())));
    }
    let d = match simultaneous_congruence(&hm, &gm) {
        Ok(d) => d,
        Err(e) => {
            return Ok(Rendered { code: exit::NON_RESULT, body: format!("no canonical form: {e}\n") });
        }
    };
    let (rh, rg) = d.residuals(&hm, &gm);
    let t = tol.get("reconstruction");
    let takagi = d.internals.takagi_residual;
    let passed = rh <= t && rg <= t && takagi.is_none_or(|x| x <= t);
    let doc = CongruenceDocument {
        schema: "twinmetric-congruence/1",
        case: if d.case == CongruenceCase::Product { "product" } else { "complex" },
        n: hm.n(),
        k: d.k,
        r: rows(&d.r),
        d_h: rows(&d.d_h),
        d_g: rows(&d.d_g),
        residual_h: Num(rh),
        residual_g: Num(rg),
        takagi_residual: takagi.map(Num),
        tolerance: Num(t),
        passed,
    };
    let body = match format {
        Format::Structured => to_structured(&doc),
        Format::Text => {
            let mut out = format!("{} case, n = {}", doc.case, doc.n);
            if let Some(k) = doc.k {
                out.push_str(&format!(", k = {k}"));
            }
            out.push('\n');
            for (label, m) in [("R", &doc.r), ("D_h", &doc.d_h), ("D_g", &doc.d_g)] {
                out.push_str(&format!("{label}:\n"));
                for row in m {
                    let cells: Vec<String> = row.iter().map(Num::to_string).collect();
                    out.push_str(&format!("  {}\n", cells.join(" ")));
                }
            }
            out.push_str(&format!("residual h = {}\nresidual g = {}\n", doc.residual_h, doc.residual_g));
            if let Some(t) = doc.takagi_residual {
                out.push_str(&format!("takagi residual = {t}\n"));
            }
            out.push_str(if passed { "PASS\n" } else { "FAIL\n" });
            out
        }
    };
    Ok(Rendered { code: if passed { exit::PASS } else { exit::FAILURE }, body })
}

#[derive(Serialize)]
struct RealifyDocument {
    schema: &'static str,
    holomorphic: String,
    coordinates: Vec<String>,
    metric: Vec<String>,
    complex_structure: Vec<String>,
    holomorphy_residual: Num,
    tolerance: Num,
    seed: u64,
    points: usize,
}

fn cmd_realify(cfg: &WorkspaceConfig, name: &str, points: usize, format: Format) -> Result<Rendered, Outcome> {
    let g = cfg.holomorphic.get(name).ok_or_else(|| Outcome::usage(format!("no holomorphic metric named `{name}`")))?;
    if points == 0 {
        return Err(Outcome::usage("--points must be positive"));
    }
    let internal = |e: &dyn std::fmt::Display| Outcome {
        code: exit::INTERNAL,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    };
    let plan = g.sample_plan(points, cfg.seed).map_err(|e| internal(&e))?;
    let hol = holomorphy_check(g, &plan).map_err(|e| internal(&e))?;
    let t = cfg.tolerances.get("holomorphy");
    if hol.max() > t {
        let body = format!(
            "`{name}` is not holomorphic: ∂̄ residual {} exceeds {}\n",
            crate::report::fmt_num(hol.max()),
            crate::report::fmt_num(t)
        );
        return Ok(Rendered { code: exit::NON_RESULT, body });
    }
    let real = realify_unchecked(g).map_err(|e| internal(&e))?;
    let doc = RealifyDocument {
        schema: "twinmetric-realify/1",
        holomorphic: name.into(),
        coordinates: real.metric.chart().coords.clone(),
        metric: real.metric.components().iter().map(ToString::to_string).collect(),
        complex_structure: real.j.components().iter().map(ToString::to_string).collect(),
        holomorphy_residual: Num(hol.max()),
        tolerance: Num(t),
        seed: cfg.seed,
        points: plan.len(),
    };
    let body = match format {
        Format::Structured => to_structured(&doc),
        Format::Text => {
            let n = doc.coordinates.len();
            let mut out = format!("coordinates: {}\nmetric:\n", doc.coordinates.join(" "));
            for (i, c) in doc.metric.iter().enumerate() {
                out.push_str(&format!("  g[{}][{}] = {c}\n", i / n, i % n));
            }
            out.push_str("complex structure:\n");
            for (i, c) in doc.complex_structure.iter().enumerate() {
                out.push_str(&format!("  J[{}][{}] = {c}\n", i / n, i % n));
            }
            out.push_str(&format!("holomorphy residual = {}\n", doc.holomorphy_residual));
            out
        }
    };
    Ok(Rendered { code: exit::PASS, body })
}
