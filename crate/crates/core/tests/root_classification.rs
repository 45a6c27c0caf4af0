use proptest::prelude::*;
use twinmetric::roots::{classify_roots, epsilon_of_root, LagrangianSpec, RootError};

/// Ascending coefficients of `Π (S − r)`.
fn from_roots(roots: &[f64]) -> Vec<f64> {
    roots.iter().fold(vec![1.0], |acc, &r| {
        let mut out = vec![0.0; acc.len() + 1];
        for (k, &a) in acc.iter().enumerate() {
            out[k + 1] += a;
            out[k] -= r * a;
        }
        out
    })
}

/// The `f` whose `φ = f′S − (n/4)f` is the given polynomial; needs
/// `k ≠ n/4` for every degree present.
fn lagrangian_for_phi(phi: &[f64], n: usize) -> Vec<f64> {
    let q = n as f64 / 4.0;
    phi.iter().enumerate().map(|(k, &p)| p / (k as f64 - q)).collect()
}

/// Sign-change scan of `φ` on a fine grid, refined by bisection.
fn scan_roots(spec: &LagrangianSpec, lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let h = (hi - lo) / steps as f64;
    let mut out = Vec::new();
    let mut a = lo;
    let mut fa = spec.phi(a);
    for i in 1..=steps {
        let b = lo + h * i as f64;
        let fb = spec.phi(b);
        if fa == 0.0 {
            out.push(a);
        } else if fa * fb < 0.0 {
            let (mut x0, mut x1) = (a, b);
            for _ in 0..80 {
                let mid = 0.5 * (x0 + x1);
                if spec.phi(x0) * spec.phi(mid) <= 0.0 {
                    x1 = mid;
                } else {
                    x0 = mid;
                }
            }
            out.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn simple_roots_match_scan(
        roots in prop::collection::btree_set(-9i32..=9, 1..=4),
        n in prop::sample::select(vec![3usize, 5, 6, 7]),
        lead in prop::sample::select(vec![-2.0f64, -1.0, 0.5, 3.0]),
    ) {
        let roots: Vec<f64> = roots.into_iter().map(f64::from).collect();
        let phi: Vec<f64> = from_roots(&roots).iter().map(|c| c * lead).collect();
        let spec = LagrangianSpec::new(lagrangian_for_phi(&phi, n), n).unwrap();
        let report = classify_roots(&spec);
        let scanned = scan_roots(&spec, -10.5, 10.5, 21_000);
        prop_assert_eq!(report.roots.len(), roots.len());
        prop_assert_eq!(scanned.len(), roots.len());
        for ((entry, &expected), &scan) in report.roots.iter().zip(&roots).zip(&scanned) {
            prop_assert!((entry.c - expected).abs() <= 1e-9);
            prop_assert!((scan - expected).abs() <= 1e-9);
            prop_assert_eq!(entry.multiplicity, 1);
            prop_assert_eq!(entry.epsilon, entry.c / n as f64);
            let fp = spec.f_prime(expected);
            prop_assert_eq!(entry.admissible, fp.abs() > 1e-10 * spec.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt());
            if entry.admissible && entry.c != 0.0 {
                let by_ratio = spec.f(entry.c) / (4.0 * spec.f_prime(entry.c));
                prop_assert!((by_ratio - entry.epsilon).abs() <= 1e-9 * entry.epsilon.abs());
                prop_assert_eq!(epsilon_of_root(entry.c, &spec).unwrap(), entry.epsilon);
            }
        }
    }

    #[test]
    fn double_roots_are_not_admissible(r in -5i32..=5, other in -5i32..=5, n in prop::sample::select(vec![3usize, 5, 6, 7])) {
        prop_assume!(r != other);
        let (r, other) = (f64::from(r), f64::from(other));
        let phi = from_roots(&[r, r, other]);
        let spec = LagrangianSpec::new(lagrangian_for_phi(&phi, n), n).unwrap();
        let report = classify_roots(&spec);
        let double = report.roots.iter().find(|e| (e.c - r).abs() < 1e-6).unwrap();
        prop_assert_eq!(double.multiplicity, 2);
        prop_assert!(!double.admissible);
        let single = report.roots.iter().find(|e| (e.c - other).abs() < 1e-9).unwrap();
        prop_assert_eq!(single.multiplicity, 1);
    }

    /// f = (nS + c₀(8 − n))²: S = c₀ is simple and admissible, and
    /// S = c₀(n − 8)/n is where f′ vanishes.
    #[test]
    fn squared_linear_family(n in 3usize..=7, c0 in prop::sample::select(vec![-3.0f64, -2.0, -1.0, 1.0, 2.0, 3.0])) {
        let nf = n as f64;
        let b = c0 * (8.0 - nf);
        let spec = LagrangianSpec::new(vec![b * b, 2.0 * nf * b, nf * nf], n).unwrap();
        let report = classify_roots(&spec);
        let simple = report.roots.iter().find(|e| (e.c - c0).abs() <= 1e-9).unwrap();
        prop_assert!(simple.admissible);
        prop_assert_eq!(simple.epsilon, simple.c / nf);
        prop_assert!((simple.epsilon - c0 / nf).abs() <= 1e-12);
        let bad = c0 * (nf - 8.0) / nf;
        let degenerate = report.roots.iter().find(|e| (e.c - bad).abs() <= 1e-7).unwrap();
        prop_assert!(!degenerate.admissible);
        let is_degenerate = matches!(epsilon_of_root(bad, &spec), Err(RootError::DegenerateRoot { .. }));
        prop_assert!(is_degenerate);
    }
}

#[test]
fn quarter_power_is_identically_degenerate() {
    // f = S^{n/4} makes φ vanish identically
    let spec = LagrangianSpec::new(vec![0.0, 1.0], 4).unwrap();
    assert!(classify_roots(&spec).identically_degenerate);
}

#[test]
fn linear_lagrangian_has_almost_tangent_root() {
    // n = 3, f = S: φ = S/4
    let spec = LagrangianSpec::new(vec![0.0, 1.0], 3).unwrap();
    let report = classify_roots(&spec);
    assert_eq!(report.roots.len(), 1);
    assert_eq!(report.roots[0].c, 0.0);
    assert!(report.roots[0].almost_tangent);
    assert_eq!(report.admissible().count(), 0);
}

#[test]
fn constant_lagrangian_has_no_roots() {
    let spec = LagrangianSpec::new(vec![2.0], 4).unwrap();
    assert!(classify_roots(&spec).roots.is_empty());
}

#[test]
fn non_roots_are_rejected() {
    let spec = LagrangianSpec::new(vec![4.0, 0.0, 1.0], 4).unwrap();
    assert!(matches!(epsilon_of_root(1.0, &spec), Err(RootError::NotARoot { .. })));
    assert_eq!(epsilon_of_root(-2.0, &spec).unwrap(), -0.5);
}
