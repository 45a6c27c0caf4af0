//! Browser bindings for the static demo page in `www/`. Each export takes
//! plain text from a form and returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use twinmetric::fixtures::sphere;
use twinmetric::matrix::{simultaneous_congruence, CongruenceCase, SymMatrix};
use twinmetric::product::{block_involution, build_warped, ProductSpec};
use twinmetric::roots::{classify_roots, LagrangianSpec};
use twinmetric::tensor::{einstein_residual, kahler_like_check, SamplePlan};
use wasm_bindgen::prelude::wasm_bindgen;

const SEED: u64 = 20_240_601;

fn render(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn numbers(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("not a number: `{t}`")))
        .collect()
}

fn rows(m: impl Fn(usize, usize) -> f64, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| m(i, j)).collect()).collect()
}

/// Rows separated by newlines or `;`.
fn parse_square(text: &str) -> Result<SymMatrix, String> {
    let parsed =
        text.split(['\n', ';']).filter(|r| !r.trim().is_empty()).map(numbers).collect::<Result<Vec<_>, _>>()?;
    let n = parsed.len();
    if n == 0 || parsed.iter().any(|r| r.len() != n) {
        return Err(format!(
            "expected a square matrix, got {n} rows of lengths {:?}",
            parsed.iter().map(Vec::len).collect::<Vec<_>>()
        ));
    }
    SymMatrix::from_row_slice(n, &parsed.concat()).map_err(|e| e.to_string())
}

pub fn classify_roots_value(coeffs: &str, n: usize) -> Result<Value, String> {
    let spec = LagrangianSpec::new(numbers(coeffs)?, n).map_err(|e| e.to_string())?;
    let report = classify_roots(&spec);
    let roots: Vec<Value> = report
        .roots
        .iter()
        .map(|r| {
            json!({
                "c": r.c,
                "multiplicity": r.multiplicity,
                "f_prime": r.f_prime_at_c,
                "epsilon": r.epsilon,
                "admissible": r.admissible,
                "almost_tangent": r.almost_tangent,
            })
        })
        .collect();
    Ok(json!({ "identically_degenerate": report.identically_degenerate, "roots": roots }))
}

pub fn congruence_value(h: &str, g: &str) -> Result<Value, String> {
    let (h, g) = (parse_square(h)?, parse_square(g)?);
    if h.n() != g.n() {
        return Err(format!("h is {0}×{0} but g is {1}×{1}", h.n(), g.n()));
    }
    let d = simultaneous_congruence(&h, &g).map_err(|e| e.to_string())?;
    let (rh, rg) = d.residuals(&h, &g);
    let n = h.n();
    Ok(json!({
        "case": match d.case { CongruenceCase::Product => "product", CongruenceCase::Complex => "complex" },
        "k": d.k,
        "r": rows(|i, j| d.r[(i, j)], n),
        "d_h": rows(|i, j| d.d_h[(i, j)], n),
        "d_g": rows(|i, j| d.d_g[(i, j)], n),
        "residual_h": rh,
        "residual_g": rg,
        "takagi_residual": d.internals.takagi_residual,
    }))
}

/// `S²(r₁) × S²(r₂)` with optional warp `e^{2θ}` on the second factor;
/// `θ` is written in the first factor's coordinates `th1a`, `pha`.
pub fn sphere_product_value(r1: f64, r2: f64, warp: &str, points: usize) -> Result<Value, String> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err("radii must be positive".into());
    }
    let mut spec = ProductSpec::new(
        sphere(2, r1, "a").map_err(|e| e.to_string())?,
        sphere(2, r2, "b").map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    if !warp.trim().is_empty() {
        spec = spec.with_warp_text(warp).map_err(|e| e.to_string())?;
    }
    let g = build_warped(&spec).map_err(|e| e.to_string())?;
    let plan = SamplePlan::halton(g.chart(), points.clamp(1, 256), SEED).map_err(|e| e.to_string())?;
    let fit = einstein_residual(&g, &plan).map_err(|e| e.to_string())?;
    let p = block_involution(g.chart(), spec.k()).map_err(|e| e.to_string())?;
    let parallel = kahler_like_check(&g, &p, &plan, 1e-8).map_err(|e| e.to_string())?;
    Ok(json!({
        "points": fit.points,
        "gamma": fit.gamma,
        "einstein_residual": fit.max_residual,
        "nabla_p": parallel.max_nabla_k,
        "decomposable": parallel.passed,
    }))
}

#[wasm_bindgen]
pub fn classify_roots_json(coeffs: &str, n: u32) -> String {
    render(classify_roots_value(coeffs, n as usize))
}

#[wasm_bindgen]
pub fn congruence_json(h: &str, g: &str) -> String {
    render(congruence_value(h, g))
}

#[wasm_bindgen]
pub fn sphere_product_json(r1: f64, r2: f64, warp: &str, points: u32) -> String {
    render(sphere_product_value(r1, r2, warp, points as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_the_quadratic_example() {
        let v = classify_roots_value("64, 64, 16", 4).unwrap();
        let roots = v["roots"].as_array().unwrap();
        assert_eq!(roots.len(), 2);
        let good = roots.iter().find(|r| r["admissible"] == true).unwrap();
        assert_eq!(good["c"], 2.0);
        assert_eq!(good["epsilon"], 0.5);
        assert!(classify_roots_value("1 x", 4).is_err());
        assert!(classify_roots_json("1", 2).contains("\"error\""));
    }

    #[test]
    fn congruence_of_the_canonical_complex_pair() {
        let v = congruence_value("1 0; 0 -1", "0 1\n1 0").unwrap();
        assert_eq!(v["case"], "complex");
        assert!(v["residual_h"].as_f64().unwrap() <= 1e-12);
        assert!(congruence_value("1 0; 0 1", "1 0.5; 0.5 2").is_err());
        assert!(congruence_value("1 0; 0 1", "1").is_err());
        assert!(congruence_value("1 2; 0 1", "1 0; 0 1").is_err());
    }

    #[test]
    fn sphere_products() {
        let equal = sphere_product_value(1.0, 1.0, "", 8).unwrap();
        assert!((equal["gamma"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
        assert!(equal["einstein_residual"].as_f64().unwrap() <= 1e-9);
        assert_eq!(equal["decomposable"], true);
        let unequal = sphere_product_value(1.0, 2.0, "", 8).unwrap();
        assert!(unequal["einstein_residual"].as_f64().unwrap() >= 0.1);
        let warped = sphere_product_value(1.0, 1.0, "0.3*cos(th1a)", 8).unwrap();
        assert_eq!(warped["decomposable"], false);
        assert!(sphere_product_value(1.0, 1.0, "u", 8).is_err());
    }
}
