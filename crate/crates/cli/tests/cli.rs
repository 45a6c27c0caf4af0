use std::path::{Path, PathBuf};
use std::process::Command;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use twinmetric::fixtures::random_product_pair;
use twinmetric_cli::matrix_file::format_matrix;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/workspace.toml")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_twinmetric")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn with_config(args: &[&str]) -> Run {
    let cfg = workspace();
    let mut all = vec!["--config", cfg.to_str().unwrap()];
    all.extend_from_slice(args);
    run(&all)
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let r = with_config(&all);
    (r.code, serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}{}", r.stdout, r.stderr)))
}

fn entry<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["entries"].as_array().unwrap().iter().find(|e| e["name"] == name).unwrap()
}

#[test]
fn sphere_product_palatini_passes() {
    let (code, doc) = structured(&["verify", "sphere-product-palatini"]);
    assert_eq!(code, 0);
    assert_eq!(doc["schema"], "twinmetric-report/1");
    assert_eq!(doc["passed"], true);
    let p = entry(&doc, "palatini:sphere-product");
    assert_eq!(p["values"]["epsilon"].as_f64().unwrap(), 0.5);
    assert!(p["residuals"]["field_equation"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn complex_sphere_einstein_passes() {
    let (code, doc) = structured(&["verify", "complex-sphere-einstein"]);
    assert_eq!(code, 0);
    let e = entry(&doc, "complex-einstein:complex-sphere-2");
    assert!((e["values"]["gamma_re"].as_f64().unwrap() - 1.0).abs() <= 1e-8);
    assert!((entry(&doc, "palatini:realified-sphere")["values"]["epsilon"].as_f64().unwrap() + 0.5).abs() == 0.0);
}

#[test]
fn identity_and_curvature_suites_pass() {
    for suite in ["kahler-identities", "curvature", "congruence"] {
        let r = with_config(&["verify", suite]);
        assert_eq!(r.code, 0, "{suite}: {}", r.stdout);
    }
}

#[test]
fn sabotaged_warp_fails_decomposability() {
    let (code, doc) = structured(&["verify", "warped-decomposability"]);
    assert_eq!(code, 1);
    assert_eq!(doc["passed"], false);
    assert_eq!(entry(&doc, "decomposable:warped-plane")["status"], "fail");
    assert_eq!(entry(&doc, "structural:warped-plane")["status"], "pass");
}

#[test]
fn contaminated_metric_fails_anti_kahler() {
    let (code, doc) = structured(&["verify", "anti-kahler-control"]);
    assert_eq!(code, 1);
    let e = entry(&doc, "anti-kahler:contaminated");
    assert!(e["residuals"]["nabla_j"].as_f64().unwrap() >= 0.1);
    assert!(e["residuals"]["ricci_mixed_block"].as_f64().unwrap() >= 0.1);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let r = with_config(&[
            "verify",
            "complex-sphere-einstein",
            "--format",
            "structured",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(r.code, 0);
        assert!(r.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(!text.contains("wall_time"));
    // numbers carry 17 significant digits
    assert!(text.contains("\"gamma_expected\": 1.0000000000000000e0"));
}

#[test]
fn seed_and_timings_flags() {
    let (_, doc) = structured(&["verify", "curvature", "--seed", "7"]);
    assert_eq!(doc["seed"], 7);
    assert_eq!(entry(&doc, "einstein:unit-sphere-a")["seed"], 7);
    let (_, timed) = structured(&["verify", "curvature", "--timings"]);
    assert!(entry(&timed, "einstein:unit-sphere-a")["wall_time"].as_f64().unwrap() >= 0.0);
}

#[test]
fn tolerance_overrides_reach_checks() {
    let (code, doc) = structured(&["verify", "curvature", "--tolerance", "einstein=1e-30"]);
    assert_eq!(code, 1);
    assert_eq!(entry(&doc, "einstein:unit-sphere-a")["tolerances"]["einstein"].as_f64().unwrap(), 1e-30);
    assert_eq!(with_config(&["verify", "curvature", "--tolerance", "bogus=1"]).code, 64);
    assert_eq!(with_config(&["verify", "curvature", "--tolerance", "einstein"]).code, 64);
}

#[test]
fn report_verb_rerenders_saved_documents() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("warp.json");
    let r =
        with_config(&["verify", "warped-decomposability", "--format", "structured", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    let text = run(&["report", path.to_str().unwrap()]);
    assert_eq!(text.code, 1);
    assert!(text.stdout.contains("FAIL decomposable:warped-plane"));
    let again = run(&["report", path.to_str().unwrap(), "--format", "structured"]);
    assert_eq!(again.stdout, std::fs::read_to_string(&path).unwrap());
    std::fs::write(&path, "{}").unwrap();
    assert_eq!(run(&["report", path.to_str().unwrap()]).code, 64);
}

#[test]
fn roots_verb() {
    let (code, doc) = structured(&["roots", "product-quadratic"]);
    assert_eq!(code, 0);
    let roots = doc["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    assert_eq!(roots.iter().filter(|r| r["admissible"] == true).count(), 1);
    let admissible = roots.iter().find(|r| r["admissible"] == true).unwrap();
    assert_eq!(admissible["c"].as_f64().unwrap(), 2.0);
    assert_eq!(admissible["epsilon"].as_f64().unwrap(), 0.5);

    let degenerate = with_config(&["roots", "quarter-power"]);
    assert_eq!(degenerate.code, 2);
    assert!(degenerate.stdout.contains("vanishes identically"));
    assert_eq!(with_config(&["roots", "missing"]).code, 64);
    assert_eq!(with_config(&["roots"]).code, 64);
}

fn write(dir: &Path, name: &str, m: &DMatrix<f64>) -> String {
    let path = dir.join(name);
    std::fs::write(&path, format_matrix(m)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn congruence_verb() {
    let dir = tempfile::tempdir().unwrap();
    // canonical complex pair
    let h = write(dir.path(), "h.txt", &DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0]));
    let g = write(dir.path(), "g.txt", &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    let r = run(&["congruence", &h, &g, "--format", "structured"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["case"], "complex");
    assert_eq!(doc["residual_h"].as_f64().unwrap(), 0.0);
    let rm: Vec<f64> = doc["r"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap().clone())
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(rm == [1.0, 0.0, 0.0, 1.0] || rm == [-1.0, 0.0, 0.0, -1.0], "{rm:?}");

    // a random product pair
    let pair = random_product_pair(&mut ChaCha8Rng::seed_from_u64(5), 5, 100.0);
    let h = write(dir.path(), "h5.txt", pair.h.as_matrix());
    let g = write(dir.path(), "g5.txt", pair.g.as_matrix());
    let r = run(&["congruence", &h, &g, "--format", "structured"]);
    assert_eq!(r.code, 0);
    let doc: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(doc["k"].as_u64().map(|k| k as usize), pair.k);
    assert!(doc["residual_h"].as_f64().unwrap() <= 1e-9 && doc["residual_g"].as_f64().unwrap() <= 1e-9);

    // mismatched dimensions, unreadable files and non-pairs
    let small = write(dir.path(), "i2.txt", &DMatrix::identity(2, 2));
    assert_eq!(run(&["congruence", &small, &g]).code, 64);
    assert_eq!(run(&["congruence", &small, "/nonexistent/matrix.txt"]).code, 64);
    let skew = write(dir.path(), "skew.txt", &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]));
    assert_eq!(run(&["congruence", &small, &skew]).code, 64);
    let other = write(dir.path(), "o2.txt", &DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]));
    let r = run(&["congruence", &small, &other]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("no canonical form"));
}

#[test]
fn realify_verb() {
    let (code, doc) = structured(&["realify", "complex-sphere-2", "--points", "8"]);
    assert_eq!(code, 0);
    assert_eq!(doc["coordinates"].as_array().unwrap().len(), 4);
    assert_eq!(doc["metric"].as_array().unwrap().len(), 16);
    let r = with_config(&["realify", "contaminated"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("not holomorphic"));
    assert_eq!(with_config(&["realify", "nothing"]).code, 64);
}

#[test]
fn configuration_errors_are_usage_errors() {
    assert_eq!(run(&["verify", "curvature"]).code, 64);
    assert_eq!(with_config(&["verify", "no-such-suite"]).code, 64);
    assert_eq!(run(&["verify", "x", "--config", "/nonexistent.toml"]).code, 64);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[metrics.m]\nchart = \"missing\"\ndiagonal = [\"1\"]\n").unwrap();
    let r = run(&["verify", "s", "--config", bad.to_str().unwrap()]);
    assert_eq!(r.code, 64);
    assert!(r.stderr.contains("unknown chart `missing`"), "{}", r.stderr);
    assert_eq!(run(&["frobnicate"]).code, 64);
    assert_eq!(run(&["--help"]).code, 0);
}
