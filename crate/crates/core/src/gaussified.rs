//! Covariance-matrix evolution of the Gaussified state.
//!
//! `dΓ_kl/dt = i tr(c_k c_l L(ρ_G)) = i tr(L†(c_k c_l) ρ_G)` for `k < l`. The
//! Heisenberg-evolved quadratics `L†(c_k c_l)` are computed symbolically once;
//! each evaluation then needs one Wick expectation per distinct monomial.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fock::{operator_distance, real_distance, DensityMatrix, NormKind};
use crate::gaussian::{
    covariance_from_dense, dense_from_covariance, monomial_expectation, param_count, standard_form, upper_pairs,
    CovarianceMatrix,
};
use crate::linalg::{RMat, C64, I};
use crate::majorana::PolynomialOperator;
use crate::model::LindbladSpec;
use crate::ode::{rk4_step, TimeGrid, Trajectory};

pub const HAMILTONIAN_DEGREE_CAP: usize = 4;
pub const JUMP_DEGREE_CAP: usize = 2;
/// Excursions of `|λ_j|` above 1 up to this are clipped without comment.
pub const SILENT_CLIP: f64 = 1e-6;
/// Excursions beyond this abort the integration.
pub const ABORT_EXCURSION: f64 = 1e-3;

/// `Γ ↦ dΓ/dt` compiled from a generator.
#[derive(Clone, Debug)]
pub struct CmGenerator {
    modes: usize,
    /// Distinct monomials appearing in any `L†(c_k c_l)`.
    masks: Vec<u64>,
    /// Per upper pair `(k, l)`: `(monomial slot, i·coefficient)`.
    rows: Vec<Vec<(usize, C64)>>,
}

impl CmGenerator {
    /// Rejects Hamiltonians above degree 4 and jumps above degree 2.
    pub fn new(spec: &LindbladSpec) -> Result<Self> {
        spec.check_degrees(HAMILTONIAN_DEGREE_CAP, JUMP_DEGREE_CAP)?;
        let modes = spec.modes();
        let mut slots: BTreeMap<u64, usize> = BTreeMap::new();
        let mut masks = Vec::new();
        let mut rows = Vec::with_capacity(param_count(modes));
        for (k, l) in upper_pairs(modes) {
            let q = PolynomialOperator::monomial(modes, C64::new(1.0, 0.0), &[k, l])?;
            let heis = spec.adjoint_apply(&q);
            let mut row = Vec::new();
            for (mask, coef) in heis.iter() {
                // odd monomials vanish on every even state
                if mask.count_ones() % 2 == 1 {
                    continue;
                }
                let slot = *slots.entry(mask).or_insert_with(|| {
                    masks.push(mask);
                    masks.len() - 1
                });
                row.push((slot, I * coef));
            }
            rows.push(row);
        }
        Ok(Self { modes, masks, rows })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of distinct Wick expectations per evaluation.
    pub fn monomial_count(&self) -> usize {
        self.masks.len()
    }

    /// `dΓ/dt` in packed upper-triangle order for any antisymmetric `Γ`.
    pub fn rate_upper(&self, gamma: &RMat) -> Vec<f64> {
        let expectations: Vec<C64> = self.masks.iter().map(|&m| monomial_expectation(gamma, m)).collect();
        self.rows.iter().map(|row| row.iter().map(|&(s, c)| c * expectations[s]).sum::<C64>().re).collect()
    }

    /// `dΓ/dt` as an exactly antisymmetric matrix.
    pub fn rate(&self, cm: &CovarianceMatrix) -> Result<RMat> {
        if cm.modes() != self.modes {
            return Err(Error::DimensionMismatch { expected: self.modes, found: cm.modes() });
        }
        let upper = self.rate_upper(cm.matrix());
        Ok(CovarianceMatrix::from_upper_unchecked(self.modes, &upper)?.matrix().clone())
    }
}

/// `dΓ_kl/dt = (i/2) tr([c_k, c_l] L(ρ_G(Γ)))` via Wick's theorem.
pub fn cm_equation_of_motion(cm: &CovarianceMatrix, spec: &LindbladSpec) -> Result<RMat> {
    spec.check_modes(cm.modes())?;
    CmGenerator::new(spec)?.rate(cm)
}

/// Pulls `|λ_j|` back to 1 after an integrator overshoot.
///
/// Returns the excursion `max_j |λ_j| - 1` that was removed (0 if none).
fn clip_to_physical(modes: usize, upper: &mut [f64], time: f64) -> Result<f64> {
    let cm = CovarianceMatrix::from_upper_unchecked(modes, upper)?;
    let excursion = cm.max_abs_lambda() - 1.0;
    if excursion <= 0.0 {
        return Ok(0.0);
    }
    if excursion > ABORT_EXCURSION {
        return Err(Error::IntegrationAborted {
            time,
            reason: alloc::format!("covariance eigenvalue excursion {excursion:e} beyond 1"),
        });
    }
    if excursion > SILENT_CLIP {
        log::warn!("t = {time}: clipping covariance eigenvalue excursion {excursion:e}");
    }
    let mut sf = standard_form(&cm)?;
    for l in sf.lambdas.iter_mut() {
        *l = l.min(1.0);
    }
    let g = sf.reconstruct();
    for (slot, (k, l)) in upper_pairs(modes).into_iter().enumerate() {
        upper[slot] = 0.5 * (g[(k, l)] - g[(l, k)]);
    }
    Ok(excursion)
}

/// RK4 on the packed upper triangle of `Γ`, so antisymmetry is exact.
pub fn integrate_gaussified(
    cm0: &CovarianceMatrix,
    spec: &LindbladSpec,
    grid: &TimeGrid,
) -> Result<Trajectory<CovarianceMatrix>> {
    spec.check_modes(cm0.modes())?;
    let generator = CmGenerator::new(spec)?;
    let modes = cm0.modes();
    let mut x = cm0.upper();
    let mut traj = Trajectory::new();
    traj.push(0.0, cm0.clone());
    for step in 1..=grid.steps() {
        let t = grid.time_at(step);
        x = rk4_step(&x, grid.dt(), |y: &Vec<f64>| {
            let g = CovarianceMatrix::from_upper_unchecked(modes, y)?;
            Ok(generator.rate_upper(g.matrix()))
        })?;
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::IntegrationAborted { time: t, reason: "non-finite covariance".into() });
        }
        clip_to_physical(modes, &mut x, t)?;
        if grid.is_sample(step) {
            traj.push(t, CovarianceMatrix::from_upper(modes, &x)?);
        }
    }
    Ok(traj)
}

/// Distances between the exact and Gaussified evolutions at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonSample {
    pub t: f64,
    /// `‖Γ_G(t) - Γ(ρ(t))‖`
    pub d_gamma: f64,
    /// `‖ρ_G(t) - ρ(t)‖`
    pub d_rho: f64,
}

/// Pointwise distances; sample times must agree to 1e-12.
pub fn compare_trajectories(
    exact: &Trajectory<DensityMatrix>,
    gaussified: &Trajectory<CovarianceMatrix>,
    kind: NormKind,
) -> Result<Vec<ComparisonSample>> {
    if exact.len() != gaussified.len() {
        return Err(Error::TimeGridMismatch(exact.len().min(gaussified.len())));
    }
    exact
        .iter()
        .zip(gaussified.iter())
        .enumerate()
        .map(|(i, ((t, rho), (tg, cm)))| {
            if (t - tg).abs() > 1e-12 {
                return Err(Error::TimeGridMismatch(i));
            }
            let exact_cm = covariance_from_dense(rho)?;
            let d_gamma = real_distance(cm.matrix(), exact_cm.matrix(), kind)?;
            let rho_g = dense_from_covariance(cm)?;
            let d_rho = operator_distance(rho_g.matrix(), rho.matrix(), kind)?;
            Ok(ComparisonSample { t, d_gamma, d_rho })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorana::PolynomialOperator;
    use crate::model::Jump;
    use alloc::vec;

    fn decay(modes: usize) -> LindbladSpec {
        let jumps = (0..modes)
            .map(|j| Jump { operator: PolynomialOperator::annihilation(modes, j).unwrap(), rate: 1.0 })
            .collect();
        LindbladSpec::new(PolynomialOperator::zero(modes), jumps).unwrap()
    }

    #[test]
    fn trivial_generator_is_static() {
        let spec = LindbladSpec::trivial(2).unwrap();
        let cm = CovarianceMatrix::with_block_values(2, &[0.3, -0.4]);
        assert!(cm_equation_of_motion(&cm, &spec).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_mode_decay() {
        // Γ_01 = 1 - 2n, n(t) = e^{-t}
        let cm0 = CovarianceMatrix::with_block_values(1, &[-1.0]);
        let grid = TimeGrid::new(2.0, 1e-3, 0.5).unwrap();
        let traj = integrate_gaussified(&cm0, &decay(1), &grid).unwrap();
        for (t, cm) in traj.iter() {
            let n = 0.5 * (1.0 - cm.get(0, 1));
            assert!((n - (-t).exp()).abs() < 1e-6, "t={t} n={n}");
        }
    }

    #[test]
    fn degree_caps() {
        let h = PolynomialOperator::monomial(3, I, &[0, 1, 2, 3, 4, 5]).unwrap();
        let spec = LindbladSpec::closed(h).unwrap();
        assert!(matches!(CmGenerator::new(&spec), Err(Error::DegreeOverflow { degree: 6, cap: 4 })));
        let j = PolynomialOperator::monomial(2, C64::new(1.0, 0.0), &[0, 1, 2]).unwrap();
        let spec = LindbladSpec::new(PolynomialOperator::zero(2), vec![Jump { operator: j, rate: 1.0 }]).unwrap();
        assert!(CmGenerator::new(&spec).is_err());
    }

    #[test]
    fn clipping_policy() {
        let mut up = vec![1.0 + 1e-7];
        assert!(clip_to_physical(1, &mut up, 0.0).unwrap() > 0.0);
        assert!((up[0] - 1.0).abs() < 1e-15);
        let mut up = vec![1.01];
        assert!(clip_to_physical(1, &mut up, 0.0).is_err());
    }
}
