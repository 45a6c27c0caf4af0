use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twinmetric::fixtures::{random_complex_pair, random_conditioned, random_product_pair};
use twinmetric::matrix::{
    involution_decompose, k_from_pair, simultaneous_congruence, takagi_like_factor, twin_from_k, CongruenceCase,
    MatrixError, SymMatrix,
};
use twinmetric::product::riemannianize_at;

fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn product_pairs_reconstruct(seed in any::<u64>(), n in 2usize..=8, log_cond in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_product_pair(&mut rng, n, 10f64.powf(log_cond));
        let d = simultaneous_congruence(&pair.h, &pair.g).unwrap();
        let (rh, rg) = d.residuals(&pair.h, &pair.g);
        prop_assert!(rh <= 1e-9 && rg <= 1e-9, "{rh:e} {rg:e}");
        prop_assert_eq!(d.case, CongruenceCase::Product);
        prop_assert_eq!(d.k, pair.k);
        // canonical forms are diagonal ±1 and D_g = D_h·D_k up to row order
        for i in 0..n {
            prop_assert!(d.d_h[(i, i)].abs() == 1.0 && d.d_g[(i, i)].abs() == 1.0);
        }
        prop_assert_eq!(d.d_h.clone() - DMatrix::from_diagonal(&d.d_h.diagonal()), DMatrix::zeros(n, n));
        let minus = (0..n).filter(|&i| d.d_h[(i, i)] != d.d_g[(i, i)]).count();
        prop_assert_eq!(Some(minus), pair.k);
    }

    #[test]
    fn complex_pairs_reconstruct(seed in any::<u64>(), m in 1usize..=4, log_cond in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_complex_pair(&mut rng, 2 * m, 10f64.powf(log_cond));
        let d = simultaneous_congruence(&pair.h, &pair.g).unwrap();
        let (rh, rg) = d.residuals(&pair.h, &pair.g);
        prop_assert!(rh <= 1e-9 && rg <= 1e-9, "{rh:e} {rg:e}");
        prop_assert_eq!(&d.d_h, &pair.d_h);
        prop_assert_eq!(&d.d_g, &pair.d_g);
        prop_assert!(d.internals.takagi_residual.unwrap() <= 1e-9);
    }

    #[test]
    fn determinant_law(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (pair, eps) = if n % 2 == 0 && rng.gen_bool(0.5) {
            (random_complex_pair(&mut rng, n, 10.0), -1.0f64)
        } else {
            (random_product_pair(&mut rng, n, 10.0), 1.0)
        };
        let ratio = pair.g.as_matrix().determinant() / pair.h.as_matrix().determinant();
        let target = eps.powi(n as i32);
        prop_assert!((ratio * ratio - target).abs() <= 1e-9 * target.abs());
    }

    #[test]
    fn rescaling_keeps_k(seed in any::<u64>(), n in 2usize..=6, scale in 0.1f64..10.0) {
        // (h⁻¹(λg))² = λ²·(h⁻¹g)²: the recovered ε scales by λ²
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_product_pair(&mut rng, n, 5.0);
        let scaled = SymMatrix::new(pair.g.as_matrix() * scale).unwrap();
        let (k, eps) = k_from_pair(&pair.h, &scaled, 1e-9).unwrap();
        prop_assert!((eps - scale * scale).abs() <= 1e-9 * scale * scale);
        let (k1, _) = k_from_pair(&pair.h, &pair.g, 1e-9).unwrap();
        prop_assert!(rel(&(k / scale), &k1) <= 1e-10);
    }

    #[test]
    fn involutions_decompose(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(0..=n);
        let r = random_conditioned(&mut rng, n, 20.0);
        let dk = DMatrix::from_fn(n, n, |i, j| if i != j { 0.0 } else if i < k { -1.0 } else { 1.0 });
        let p = &r * dk * r.clone().try_inverse().unwrap();
        let d = involution_decompose(&p, 1.0, 1e-9).unwrap();
        prop_assert_eq!(d.k, Some(k));
        let back = &d.m * d.canonical() * d.m.clone().try_inverse().unwrap();
        prop_assert!(rel(&back, &p) <= 1e-10);
    }

    #[test]
    fn complex_structures_decompose(seed in any::<u64>(), m in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_conditioned(&mut rng, 2 * m, 20.0);
        let j = twinmetric::matrix::j0(m);
        let p = &r * &j * r.clone().try_inverse().unwrap();
        let d = involution_decompose(&p, -1.0, 1e-9).unwrap();
        prop_assert_eq!(d.canonical(), j);
        prop_assert!(rel(&(&p * &d.m), &(&d.m * d.canonical())) <= 1e-10);
    }

    #[test]
    fn takagi_factors_random_symmetric(seed in any::<u64>(), m in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(m, m, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let c = &a + a.transpose();
        let f = takagi_like_factor(&c).unwrap();
        prop_assert!(f.residual() <= 1e-9, "{}", f.residual());
        prop_assert!(f.n.determinant().norm() > 0.0);
    }

    #[test]
    fn twins_of_compatible_structures(seed in any::<u64>(), n in 2usize..=6) {
        // h = RᵗD R, K = R⁻¹ D_k R with D commuting with D_k
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_product_pair(&mut rng, n, 5.0);
        let (k, eps) = k_from_pair(&pair.h, &pair.g, 1e-9).unwrap();
        let twin = twin_from_k(&pair.h, &k, eps.signum(), 1e-9).unwrap();
        prop_assert!(rel(twin.as_matrix(), pair.g.as_matrix()) <= 1e-10);
    }

    #[test]
    fn riemannianization_invariants(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_conditioned(&mut rng, n, 10.0);
        let signs = DMatrix::from_fn(n, n, |i, j| if i != j { 0.0 } else if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
        let g = r.transpose() * &signs * &r;
        let b = random_conditioned(&mut rng, n, 3.0);
        let h0 = b.transpose() * &b;
        let flat = |m: &DMatrix<f64>| m.transpose().iter().copied().collect::<Vec<_>>();
        let rp = riemannianize_at(&flat(&g), &flat(&h0), n).unwrap();
        let p = DMatrix::from_row_slice(n, n, &rp.p);
        let h = DMatrix::from_row_slice(n, n, &rp.h);
        let id = DMatrix::<f64>::identity(n, n);
        prop_assert!((&p * &p - &id).norm() <= 1e-9 * p.norm_squared().max(1.0));
        prop_assert!(rel(&(p.transpose() * &h * &p), &h) <= 1e-9);
        prop_assert!(rel(&(p.transpose() * &h), &g) <= 1e-9);
        prop_assert!(h.clone().cholesky().is_some());
        // the +1 eigenspace of P is where g agrees with h, so its dimension
        // is the positive index of g
        let plus = ((p.trace() + n as f64) / 2.0).round() as usize;
        let positive = (0..n).filter(|&i| signs[(i, i)] > 0.0).count();
        prop_assert_eq!(plus, positive);
    }
}

#[test]
fn non_pairs_are_rejected() {
    let h = SymMatrix::identity(2);
    let g = SymMatrix::from_row_slice(2, &[1.0, 0.5, 0.5, 2.0]).unwrap();
    assert!(matches!(simultaneous_congruence(&h, &g), Err(MatrixError::NotAKPair { .. })));
}

#[test]
fn singular_metric_is_rejected() {
    let h = SymMatrix::diagonal(&[1.0, 0.0]);
    assert!(matches!(k_from_pair(&h, &SymMatrix::identity(2), 1e-9), Err(MatrixError::Singular { .. })));
}
