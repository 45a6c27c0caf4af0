use twinmetric::dsl::ChartSpec;
use twinmetric::fixtures;
use twinmetric::product::{build_product, build_warped, einstein_product_criterion, riemannianize, ProductSpec};
use twinmetric::tensor::{
    christoffel, curvature_k_identities, einstein_residual, kahler_like_check, nijenhuis, psi_symmetry_check,
    ricci_twin_check, structural_residuals, twin_field, KField, MetricField, SamplePlan, TensorError, TwinKind,
};

fn plan(g: &MetricField, count: usize) -> SamplePlan {
    SamplePlan::halton(g.chart(), count, 7).unwrap()
}

/// Flat ℝ² with the reflection `K = [[cos a, sin a], [sin a, −cos a]]`,
/// compatible with the metric but not parallel.
fn rotating_reflection() -> (MetricField, KField) {
    let g = fixtures::flat(&["a", "b"]).unwrap();
    let k = KField::parse(g.chart().clone(), &["cos(a)", "sin(a)", "sin(a)", "-cos(a)"], 1.0, 1.0).unwrap();
    (g, k)
}

/// Flat ℝ⁴ with `K = cos(a)·L_i + sin(a)·L_j`, where `L_i`, `L_j` are left
/// multiplication by the quaternion units; orthogonal with `K² = −I`.
fn rotating_complex() -> (MetricField, KField) {
    let g = fixtures::flat(&["a", "b", "c", "d"]).unwrap();
    #[rustfmt::skip]
    let texts = [
        "0", "-cos(a)", "-sin(a)", "0",
        "cos(a)", "0", "0", "sin(a)",
        "sin(a)", "0", "0", "-cos(a)",
        "0", "-sin(a)", "cos(a)", "0",
    ];
    let k = KField::parse(g.chart().clone(), &texts, -1.0, 1.0).unwrap();
    (g, k)
}

#[test]
fn round_spheres_are_einstein() {
    for m in [2, 3] {
        let g = fixtures::sphere(m, 1.0, "").unwrap();
        let fit = einstein_residual(&g, &plan(&g, 64)).unwrap();
        assert!((fit.gamma - (m as f64 - 1.0)).abs() <= 1e-8, "{fit:?}");
        assert!(fit.max_residual <= 1e-8);
        // Ric = (m − 1)/r²·g
        let big = fixtures::sphere(m, 2.0, "").unwrap();
        let fit = einstein_residual(&big, &plan(&big, 16)).unwrap();
        assert!((fit.gamma - (m as f64 - 1.0) / 4.0).abs() <= 1e-8);
    }
}

#[test]
fn flat_charts_have_zero_curvature() {
    let g = fixtures::flat(&["x", "y", "z"]).unwrap();
    for p in plan(&g, 8).points() {
        assert!(christoffel(&g, p).unwrap().data.iter().all(|&x| x == 0.0));
        assert!(twinmetric::tensor::riemann(&g, p).unwrap().data.iter().all(|&x| x == 0.0));
    }
    let fit = einstein_residual(&g, &plan(&g, 8)).unwrap();
    assert_eq!(fit.gamma, 0.0);
    assert_eq!(fit.max_residual, 0.0);
}

#[test]
fn hyperbolic_space_as_warped_product() {
    let g = build_warped(&fixtures::hyperbolic_warped().unwrap()).unwrap();
    let fit = einstein_residual(&g, &plan(&g, 32)).unwrap();
    assert!((fit.gamma + 3.0).abs() <= 1e-8, "{fit:?}");
    assert!(fit.max_residual <= 1e-8);
}

#[test]
fn structural_identities_on_all_fixtures() {
    let mut metrics = vec![
        fixtures::sphere(2, 1.0, "").unwrap(),
        fixtures::sphere(3, 1.5, "").unwrap(),
        build_product(&fixtures::sphere_product(1.0, 2.0).unwrap()).unwrap().0,
        build_warped(&fixtures::warped_sphere().unwrap()).unwrap(),
        build_warped(&fixtures::hyperbolic_warped().unwrap()).unwrap(),
        fixtures::anti_kahler_palatini().unwrap().0,
    ];
    metrics.push(fixtures::kahler_sphere().unwrap().0);
    for g in &metrics {
        let r = structural_residuals(g, &plan(g, 16)).unwrap();
        assert!(r.metricity <= 1e-9 && r.density_metricity <= 1e-9 && r.torsion == 0.0, "{r:?}");
        assert!(r.bianchi <= 1e-9, "{r:?}");
    }
}

#[test]
fn warped_metric_is_conformal_to_the_split_one() {
    for spec in [fixtures::warped_sphere().unwrap(), fixtures::hyperbolic_warped().unwrap()] {
        let warped = build_warped(&spec).unwrap();
        let plain = build_product(&ProductSpec::new(spec.factor1.clone(), spec.factor2.clone()).unwrap()).unwrap().0;
        let n = spec.dim();
        let k = spec.k();
        for p in plan(&warped, 16).points() {
            let w = warped.values(p).unwrap();
            let s = plain.values(p).unwrap();
            let factor = (2.0 * p[0]).exp();
            for i in 0..n {
                for j in 0..n {
                    let expected = if i >= k && j >= k { s[i * n + j] * factor } else { s[i * n + j] };
                    assert!((w[i * n + j] - expected).abs() <= 1e-14 * expected.abs().max(1.0));
                }
            }
        }
    }
}

#[test]
fn product_twin_shares_the_connection() {
    for spec in [fixtures::sphere_product(1.0, 2.0).unwrap(), fixtures::sphere_times_plane().unwrap()] {
        let (g, p) = build_product(&spec).unwrap();
        let pl = plan(&g, 16);
        let twin = twin_field(&g, &p, &pl, 1e-12).unwrap();
        assert_eq!(twin.kind, TwinKind::Metric);
        let h = twin.as_metric().unwrap().unwrap();
        for x in pl.points() {
            let a = christoffel(&g, x).unwrap();
            let b = christoffel(&h, x).unwrap();
            let diff: f64 = a.data.iter().zip(&b.data).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
            assert!(diff <= 1e-9 * a.norm().max(1.0));
        }
    }
}

#[test]
fn einstein_products_need_equal_constants() {
    let cases = [
        (fixtures::sphere_product(1.0, 1.0).unwrap(), true),
        (fixtures::sphere_product(1.0, 2.0).unwrap(), false),
        (fixtures::sphere_times_plane().unwrap(), false),
    ];
    for (spec, einstein) in cases {
        let g = build_product(&spec).unwrap().0;
        let report = einstein_product_criterion(&spec, &plan(&g, 32), 1e-8).unwrap();
        assert!(report.consistent());
        assert_eq!(report.joint_einstein, einstein);
        assert_eq!(report.factors_agree, einstein);
    }
    // both factors Einstein, constants 1 and 1/4
    let spec = fixtures::sphere_product(1.0, 2.0).unwrap();
    let g = build_product(&spec).unwrap().0;
    let report = einstein_product_criterion(&spec, &plan(&g, 16), 1e-8).unwrap();
    assert!(report.factor1.max_residual <= 1e-8 && report.factor2.max_residual <= 1e-8);
    assert!((report.factor1.gamma - 1.0).abs() <= 1e-8 && (report.factor2.gamma - 0.25).abs() <= 1e-8);
}

#[test]
fn psi_symmetries_hold_for_compatible_structures() {
    let (g, p) = build_product(&fixtures::sphere_product(1.0, 2.0).unwrap()).unwrap();
    let (ks, j) = fixtures::kahler_sphere().unwrap();
    let anti = fixtures::anti_kahler_palatini().unwrap();
    let cases = [(g, p), (ks, j), (anti.0, anti.1), rotating_reflection(), rotating_complex()];
    for (g, k) in &cases {
        let r = psi_symmetry_check(g, k, &plan(g, 16)).unwrap();
        assert!(r.k_pair <= 1e-8 && r.swap <= 1e-8, "{r:?}");
    }
    // the last two are not parallel, so the symmetries are not vacuous there
    for (g, k) in &cases[3..] {
        let r = psi_symmetry_check(g, k, &plan(g, 16)).unwrap();
        assert!(r.max_norm >= 0.5, "{r:?}");
    }
}

#[test]
fn curvature_identities_for_parallel_structures() {
    let (g, p) = build_product(&fixtures::sphere_product(1.0, 2.0).unwrap()).unwrap();
    let (ks, j) = fixtures::kahler_sphere().unwrap();
    let anti = fixtures::anti_kahler_palatini().unwrap();
    for (g, k) in [(g, p), (ks, j), (anti.0, anti.1)] {
        let r = curvature_k_identities(&g, &k, &plan(&g, 16), 1e-8).unwrap();
        assert!(r.max() <= 1e-8, "{r:?}");
    }
}

#[test]
fn curvature_identities_refuse_non_parallel_structures() {
    let (g, k) = rotating_complex();
    assert!(matches!(curvature_k_identities(&g, &k, &plan(&g, 4), 1e-8), Err(TensorError::Hypothesis { .. })));
}

#[test]
fn ricci_twin_tracks_the_einstein_condition() {
    // Einstein with parallel K: S(K·,·) = γ·h
    let (g, p) = build_product(&fixtures::sphere_product(1.0, 1.0).unwrap()).unwrap();
    let r = ricci_twin_check(&g, &p, &plan(&g, 16), 1e-8).unwrap();
    assert!(r.max_residual <= 1e-8 && (r.lambda - 1.0).abs() <= 1e-8, "{r:?}");
    let anti = fixtures::anti_kahler_palatini().unwrap();
    let r = ricci_twin_check(&anti.0, &anti.1, &plan(&anti.0, 16), 1e-8).unwrap();
    assert!(r.max_residual <= 1e-8 && (r.lambda - 1.0).abs() <= 1e-8, "{r:?}");
    // ∇P = 0 still holds on S²(1) × S²(2) but the twin Ricci form is not
    // proportional to h
    let (g, p) = build_product(&fixtures::sphere_product(1.0, 2.0).unwrap()).unwrap();
    let pl = plan(&g, 16);
    assert!(kahler_like_check(&g, &p, &pl, 1e-8).unwrap().passed);
    let r = ricci_twin_check(&g, &p, &pl, 1e-8).unwrap();
    assert!(r.max_residual >= 0.1 && r.einstein.max_residual >= 0.1, "{r:?}");
}

#[test]
fn parallel_structures_are_integrable() {
    let (g, p) = build_product(&fixtures::sphere_product(1.0, 2.0).unwrap()).unwrap();
    let (ks, j) = fixtures::kahler_sphere().unwrap();
    let anti = fixtures::anti_kahler_palatini().unwrap();
    for (g, k) in [(g, p), (ks, j), (anti.0, anti.1)] {
        let r = kahler_like_check(&g, &k, &plan(&g, 16), 1e-8).unwrap();
        assert!(r.passed && r.max_nijenhuis <= 1e-8 && r.consistent(1e-8), "{r:?}");
    }
    let (g, k) = rotating_complex();
    let r = kahler_like_check(&g, &k, &plan(&g, 16), 1e-8).unwrap();
    assert!(!r.passed && r.consistent(1e-8));
}

#[test]
fn shear_structure_is_not_integrable() {
    let k = fixtures::shear_structure().unwrap();
    let n = nijenhuis(&k, &fixtures::SHEAR_POINT).unwrap();
    assert!(n.norm() >= 1e-3, "{}", n.norm());
}

#[test]
fn riemannianization_of_a_lorentzian_metric() {
    let chart = ChartSpec::new("lor", &["t", "x"]).unwrap().with_domain(vec![(-1.0, 1.0); 2]).unwrap();
    let g = MetricField::parse(chart.clone(), &["-(1 + x^2)", "t/2", "t/2", "1"]).unwrap();
    let h0 = MetricField::diagonal(chart, &["1", "2 + t"]).unwrap();
    let r = riemannianize(&g, &h0, &plan(&g, 16)).unwrap();
    assert!(!r.trivial);
    assert!(r.involution <= 1e-9 && r.invariance <= 1e-9 && r.reconstruction <= 1e-9, "{r:?}");
    // a Riemannian g gives P = I and h = g
    let e = fixtures::sphere(2, 1.0, "").unwrap();
    let r = riemannianize(&e, &e, &plan(&e, 4)).unwrap();
    assert!(r.trivial);
}
