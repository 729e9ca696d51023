//! Monotone α-metrics: algebraic identities and contraction under channels.

use dtdvp_core::fock::DensityMatrix;
use dtdvp_core::linalg::{frobenius, hermiticity_defect, hs_inner, CMat, C64};
use dtdvp_core::metrics::{metric_form, omega_apply, omega_inverse, AlphaMetric, LocalMetric};
use dtdvp_core::random;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(cases) }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn omega_is_self_adjoint(seed in any::<u64>(), n in 2usize..=6, alpha in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::random_density_matrix(&mut rng, n);
        let m = AlphaMetric::single(alpha).unwrap();
        let x = random::gaussian_matrix(&mut rng, n);
        let y = random::gaussian_matrix(&mut rng, n);
        let lhs = hs_inner(&x, &omega_apply(&rho, &m, &y).unwrap());
        let rhs = hs_inner(&omega_apply(&rho, &m, &x).unwrap(), &y);
        prop_assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn convex_combination_is_weighted_sum(seed in any::<u64>(), w in 0.01f64..0.99, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::random_density_matrix(&mut rng, 4);
        let x = random::random_hermitian(&mut rng, 4);
        let y = random::random_hermitian(&mut rng, 4);
        let mixed = metric_form(&rho, &AlphaMetric::convex(&[(w, a), (1.0 - w, b)]).unwrap(), &x, &y).unwrap();
        let fa = metric_form(&rho, &AlphaMetric::single(a).unwrap(), &x, &y).unwrap();
        let fb = metric_form(&rho, &AlphaMetric::single(b).unwrap(), &x, &y).unwrap();
        let sum = fa * w + fb * (1.0 - w);
        prop_assert!((mixed - sum).norm() < 1e-12 * sum.norm().max(1.0));
    }

    #[test]
    fn form_is_positive_and_real_on_hermitian_input(seed in any::<u64>(), n in 2usize..=6, alpha in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::random_density_matrix(&mut rng, n);
        let m = AlphaMetric::single(alpha).unwrap();
        let a = random::random_hermitian(&mut rng, n);
        let b = random::random_hermitian(&mut rng, n);
        let aa = metric_form(&rho, &m, &a, &a).unwrap();
        prop_assert!(aa.re >= 0.0 && aa.im.abs() < 1e-10 * aa.re.max(1.0));
        let ab = metric_form(&rho, &m, &a, &b).unwrap();
        let ba = metric_form(&rho, &m, &b, &a).unwrap();
        prop_assert!(ab.im.abs() < 1e-10 * ab.norm().max(1.0));
        prop_assert!((ab - ba).norm() < 1e-10 * ab.norm().max(1.0));
        prop_assert!(hermiticity_defect(&omega_apply(&rho, &m, &a).unwrap()) < 1e-9);
    }

    #[test]
    fn inverse_round_trips(seed in any::<u64>(), n in 2usize..=6, alpha in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::random_density_matrix(&mut rng, n);
        let m = AlphaMetric::single(alpha).unwrap();
        let tau = random::gaussian_matrix(&mut rng, n);
        let back = omega_apply(&rho, &m, &omega_inverse(&rho, &m, &tau).unwrap()).unwrap();
        prop_assert!(frobenius(&(back - &tau)) < 1e-10 * frobenius(&tau).max(1.0));
    }
}

#[test]
fn metrics_contract_under_random_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let m = AlphaMetric::single(alpha).unwrap();
        for _ in 0..100 {
            let n = rng.gen_range(2..=4);
            let rho = random::random_density_matrix(&mut rng, n);
            let a = random::random_traceless_hermitian(&mut rng, n);
            let count = rng.gen_range(2..=4);
            let kraus = random::random_channel(&mut rng, n, count);
            let rho_e = DensityMatrix::from_matrix_normalized(&random::apply_channel(&kraus, rho.matrix())).unwrap();
            let a_e = random::apply_channel(&kraus, &a);
            let before = metric_form(&rho, &m, &a, &a).unwrap().re;
            let after = metric_form(&rho_e, &m, &a_e, &a_e).unwrap().re;
            assert!(after <= before * (1.0 + 1e-8), "alpha {alpha}: {after} > {before}");
        }
    }
}

#[test]
fn maximally_mixed_reference_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let n = 4;
    let rho = DensityMatrix::maximally_mixed(n);
    let a = random::gaussian_matrix(&mut rng, n);
    let b = random::gaussian_matrix(&mut rng, n);
    let m = AlphaMetric::convex(&[(0.4, 0.1), (0.6, 0.9)]).unwrap();
    let expected = hs_inner(&a, &b) * n as f64;
    assert!((metric_form(&rho, &m, &a, &b).unwrap() - expected).norm() < 1e-12);
    let inv = omega_inverse(&rho, &m, &a).unwrap();
    assert!(frobenius(&(inv - &a / C64::new(n as f64, 0.0))) < 1e-12);
}

#[test]
fn inverse_maps_identity_to_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let rho = random::random_density_matrix(&mut rng, 5);
    for alpha in [0.0, 0.4, 1.0] {
        let m = AlphaMetric::single(alpha).unwrap();
        let inv = omega_inverse(&rho, &m, &CMat::identity(5, 5)).unwrap();
        assert!(frobenius(&(inv - rho.matrix())) < 1e-12);
    }
}

#[test]
fn local_metric_matches_free_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let rho = random::random_density_matrix(&mut rng, 4);
    let m = AlphaMetric::single(0.3).unwrap();
    let lm = LocalMetric::new(&rho, &m).unwrap();
    let a = random::random_hermitian(&mut rng, 4);
    let b = random::random_hermitian(&mut rng, 4);
    let local = lm.local_form(&lm.to_local(&a).unwrap(), &lm.to_local(&b).unwrap());
    assert!((local - metric_form(&rho, &m, &a, &b).unwrap()).norm() < 1e-12);
    assert!(lm.apply(&CMat::zeros(3, 3)).is_err());
}
