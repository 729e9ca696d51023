//! Covariance-matrix equations of motion checked against the dense generator.

use dtdvp_core::error::Error;
use dtdvp_core::fock::{integrate_exact, DenseLindblad, FockSpace, NormKind};
use dtdvp_core::gaussian::{dense_from_covariance, CovarianceMatrix};
use dtdvp_core::gaussified::{cm_equation_of_motion, compare_trajectories, integrate_gaussified, CmGenerator};
use dtdvp_core::hubbard::{build_hubbard, occupations, HubbardParams, StateRef};
use dtdvp_core::linalg::{frobenius, RMat, C64};
use dtdvp_core::majorana::{to_majorana_polynomial, FermionTerm, Ladder, PolynomialOperator};
use dtdvp_core::model::{Jump, LindbladSpec};
use dtdvp_core::ode::TimeGrid;
use dtdvp_core::random;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// `dΓ/dt = i tr(c_k c_l L(ρ_G))` through the dense generator.
fn dense_rate(cm: &CovarianceMatrix, spec: &LindbladSpec) -> RMat {
    let rho = dense_from_covariance(cm).unwrap();
    let generator = DenseLindblad::from_spec(spec).unwrap();
    FockSpace::new(cm.modes()).unwrap().second_moments(&generator.apply(rho.matrix())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(100) })]

    #[test]
    fn equation_of_motion_matches_dense_oracle(seed in any::<u64>(), modes in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cm = random::random_covariance(&mut rng, modes, 1.0);
        let jumps = rng.gen_range(0..=3);
        let spec = random::random_lindblad(&mut rng, modes, jumps, 1.0).unwrap();
        let rate = cm_equation_of_motion(&cm, &spec).unwrap();
        prop_assert!(max_abs(&(&rate - dense_rate(&cm, &spec))) < 1e-9);
        prop_assert_eq!(&rate, &(-rate.transpose()));
    }

    #[test]
    fn energy_shift_does_not_change_the_rate(seed in any::<u64>(), shift in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cm = random::random_covariance(&mut rng, 3, 0.9);
        let spec = random::random_lindblad(&mut rng, 3, 2, 1.0).unwrap();
        let a = cm_equation_of_motion(&cm, &spec).unwrap();
        let b = cm_equation_of_motion(&cm, &spec.with_energy_shift(shift)).unwrap();
        prop_assert!(max_abs(&(a - b)) < 1e-13);
    }
}

#[test]
fn hubbard_rate_matches_dense_oracle() {
    let spec = build_hubbard(&HubbardParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..3 {
        let cm = random::random_covariance(&mut rng, 8, 1.0);
        let rate = CmGenerator::new(&spec).unwrap().rate(&cm).unwrap();
        assert!(max_abs(&(rate - dense_rate(&cm, &spec))) < 1e-8);
    }
}

#[test]
fn quadratic_generators_keep_states_gaussian() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    for _ in 0..3 {
        let h = random::random_even_hermitian(&mut rng, 2, 2, 1.0);
        let jumps = (0..2)
            .map(|_| Jump { operator: random::random_homogeneous(&mut rng, 2, 1, 0.7), rate: rng.gen_range(0.1..1.0) })
            .collect();
        let spec = LindbladSpec::new(h, jumps).unwrap();
        let cm0 = random::random_covariance(&mut rng, 2, 0.9);
        let grid = TimeGrid::new(2.0, 1e-3, 0.1).unwrap();
        let generator = DenseLindblad::from_spec(&spec).unwrap();
        let exact = integrate_exact(&generator, &dense_from_covariance(&cm0).unwrap(), &grid).unwrap();
        let gauss = integrate_gaussified(&cm0, &spec, &grid).unwrap();
        for s in compare_trajectories(&exact, &gauss, NormKind::Frobenius).unwrap() {
            assert!(s.d_gamma < 1e-8 && s.d_rho < 1e-8, "t = {}: {} {}", s.t, s.d_gamma, s.d_rho);
        }
        let spectral = compare_trajectories(&exact, &gauss, NormKind::Spectral).unwrap();
        assert!(spectral.iter().all(|s| s.d_gamma < 1e-8));
    }
}

#[test]
fn trivial_generator_is_stationary() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let cm = random::random_covariance(&mut rng, 3, 0.9);
    let spec = LindbladSpec::trivial(3).unwrap();
    assert_eq!(max_abs(&cm_equation_of_motion(&cm, &spec).unwrap()), 0.0);
    let traj = integrate_gaussified(&cm, &spec, &TimeGrid::new(1.0, 1e-2, 0.1).unwrap()).unwrap();
    assert!(traj.iter().all(|(_, g)| g == &cm));
}

#[test]
fn independent_decay_reaches_vacuum() {
    let modes = 3;
    let jumps =
        (0..modes).map(|j| Jump { operator: PolynomialOperator::annihilation(modes, j).unwrap(), rate: 1.0 }).collect();
    let spec = LindbladSpec::new(PolynomialOperator::zero(modes), jumps).unwrap();
    let cm0 = CovarianceMatrix::with_block_values(modes, &[-1.0, -0.5, 0.2]);
    let n0 = [1.0, 0.75, 0.4];
    let traj = integrate_gaussified(&cm0, &spec, &TimeGrid::new(10.0, 1e-3, 0.5).unwrap()).unwrap();
    for (t, cm) in traj.iter() {
        for (j, &n) in n0.iter().enumerate() {
            let occupation = 0.5 * (1.0 - cm.get(2 * j, 2 * j + 1));
            assert!((occupation - n * (-t).exp()).abs() < 1e-6);
        }
        assert_eq!(cm.matrix(), &(-cm.matrix().transpose()));
    }
    let (_, last) = traj.last().unwrap();
    assert!(max_abs(&(last.matrix() - CovarianceMatrix::vacuum(modes).matrix())) < 1e-4);
}

#[test]
fn hubbard_gaussified_spin_decay_is_algebraic() {
    // Translation-invariant spin-diagonal states factorize ⟨n_↓(1 - n_↑)⟩,
    // so dN_↓/dt = -N_↓²/4 and N_↓(t) = 2 / (1 + t/2) from half filling.
    let params = HubbardParams::default();
    let spec = build_hubbard(&params).unwrap();
    let generator = DenseLindblad::from_spec(&spec).unwrap();
    let rho0 = dtdvp_core::fock::ground_state(&generator.hamiltonian().to_dense()).unwrap();
    let cm0 = dtdvp_core::gaussian::gaussify(&rho0).unwrap();
    let traj = integrate_gaussified(&cm0, &spec, &TimeGrid::new(10.0, 1e-3, 0.5).unwrap()).unwrap();
    let mut previous = f64::INFINITY;
    for (t, cm) in traj.iter() {
        let occ = occupations(StateRef::Gaussian(cm)).unwrap();
        assert!((occ.n_down - 2.0 / (1.0 + t / 2.0)).abs() < 1e-6, "t = {t}: {}", occ.n_down);
        assert!((occ.n_up + occ.n_down - 4.0).abs() < 1e-9);
        assert!(occ.n_down <= previous);
        previous = occ.n_down;
    }
}

#[test]
fn degree_caps_are_enforced() {
    let sextic = PolynomialOperator::monomial(3, C64::new(0.0, 1.0), &[0, 1, 2, 3, 4, 5]).unwrap();
    let spec = LindbladSpec::closed(sextic).unwrap();
    assert!(matches!(CmGenerator::new(&spec), Err(Error::DegreeOverflow { .. })));
    let cubic = PolynomialOperator::monomial(2, C64::new(1.0, 0.0), &[0, 1, 2]).unwrap();
    let spec = LindbladSpec::new(PolynomialOperator::zero(2), vec![Jump { operator: cubic, rate: 1.0 }]).unwrap();
    assert!(matches!(CmGenerator::new(&spec), Err(Error::DegreeOverflow { .. })));
}

#[test]
fn mismatched_grids_are_rejected() {
    let spec = LindbladSpec::trivial(1).unwrap();
    let cm = CovarianceMatrix::vacuum(1);
    let generator = DenseLindblad::from_spec(&spec).unwrap();
    let rho = dense_from_covariance(&cm).unwrap();
    let exact = integrate_exact(&generator, &rho, &TimeGrid::new(1.0, 1e-2, 0.1).unwrap()).unwrap();
    let gauss = integrate_gaussified(&cm, &spec, &TimeGrid::new(1.0, 1e-2, 0.2).unwrap()).unwrap();
    assert!(matches!(compare_trajectories(&exact, &gauss, NormKind::Frobenius), Err(Error::TimeGridMismatch(_))));
    let same = compare_trajectories(
        &exact,
        &integrate_gaussified(&cm, &spec, &TimeGrid::new(1.0, 1e-2, 0.1).unwrap()).unwrap(),
        NormKind::Frobenius,
    )
    .unwrap();
    assert!(same.iter().all(|s| s.d_gamma < 1e-15 && s.d_rho < 1e-15));
}

#[test]
fn second_quantized_conversion() {
    let number = to_majorana_polynomial(
        1,
        &[FermionTerm::new(C64::new(1.0, 0.0), vec![Ladder::create(0), Ladder::annihilate(0)])],
    )
    .unwrap();
    // n = ½(1 - i c_0 c_1)
    assert_eq!(number.len(), 2);
    assert!((number.coefficient(0) - C64::new(0.5, 0.0)).norm() < 1e-15);
    assert!((number.coefficient(0b11) - C64::new(0.0, -0.5)).norm() < 1e-15);

    let hop = FermionTerm::new(C64::new(1.0, 0.0), vec![Ladder::create(0), Ladder::annihilate(1)]);
    let poly = to_majorana_polynomial(2, &[hop.adjoint(), hop]).unwrap();
    assert_eq!(poly.degree(), 2);
    // the c_0 c_2 and c_1 c_3 products cancel for a real amplitude
    assert_eq!(poly.len(), 2);
    let space = FockSpace::new(2).unwrap();
    let a0 = space.annihilator(0).unwrap().to_dense();
    let a1 = space.annihilator(1).unwrap().to_dense();
    let direct = a0.adjoint() * &a1 + a1.adjoint() * &a0;
    assert!(frobenius(&(space.realize(&poly).unwrap().to_dense() - direct)) < 1e-12);

    assert!(to_majorana_polynomial(2, &[]).unwrap().is_empty());
    assert!(to_majorana_polynomial(2, &[FermionTerm::new(C64::new(1.0, 0.0), vec![Ladder::create(5)])]).is_err());
}
