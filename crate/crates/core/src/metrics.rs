//! Monotone α-metrics `Ω^α_ρ(σ) = ½(ρ^{-α} σ ρ^{α-1} + ρ^{α-1} σ ρ^{-α})`
//! and their convex combinations.
//!
//! Everything is evaluated in the eigenbasis of `ρ`, where `Ω` acts on the
//! matrix element `(a, b)` by multiplication with a positive kernel
//! `k(p_a, p_b)`; the inverse is entrywise division.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::linalg::{eigh, hs_inner, CMat, C64};

/// Spectra below this are treated as singular.
pub const EIGENVALUE_FLOOR: f64 = 1e-10;
const WEIGHT_TOL: f64 = 1e-12;

/// `Σ_i w_i Ω^{α_i}` with positive weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaMetric {
    terms: Vec<(f64, f64)>,
}

impl AlphaMetric {
    pub fn single(alpha: f64) -> Result<Self> {
        Self::convex(&[(1.0, alpha)])
    }

    /// Terms are `(weight, alpha)` pairs.
    pub fn convex(terms: &[(f64, f64)]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidWeights("at least one term is required"));
        }
        let mut total = 0.0;
        for &(w, a) in terms {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::AlphaOutOfRange(a));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidWeights("weights must be positive"));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidWeights("weights must sum to one"));
        }
        Ok(Self { terms: terms.to_vec() })
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    /// `k(p, q) = Σ_i w_i ½(p^{-α_i} q^{α_i-1} + p^{α_i-1} q^{-α_i})`.
    pub fn kernel(&self, p: f64, q: f64) -> f64 {
        let (lp, lq) = (p.ln(), q.ln());
        self.terms
            .iter()
            .map(|&(w, a)| 0.5 * w * ((-a * lp + (a - 1.0) * lq).exp() + ((a - 1.0) * lp - a * lq).exp()))
            .sum()
    }
}

/// `Ω_ρ` for a fixed state, with the eigendecomposition and kernel cached.
#[derive(Clone, Debug)]
pub struct LocalMetric {
    basis: CMat,
    kernel: CMat,
}

impl LocalMetric {
    pub fn new(rho: &DensityMatrix, metric: &AlphaMetric) -> Result<Self> {
        let (p, u) = eigh(rho.matrix());
        let min = p.first().copied().unwrap_or(0.0);
        if !(min > EIGENVALUE_FLOOR) {
            return Err(Error::SingularState(min));
        }
        let n = p.len();
        let kernel = CMat::from_fn(n, n, |a, b| C64::new(metric.kernel(p[a], p[b]), 0.0));
        Ok(Self { basis: u, kernel })
    }

    fn dim(&self) -> usize {
        self.basis.nrows()
    }

    fn check(&self, sigma: &CMat) -> Result<()> {
        if sigma.nrows() != self.dim() || sigma.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: sigma.nrows() });
        }
        Ok(())
    }

    fn transform(&self, sigma: &CMat, f: impl Fn(C64, C64) -> C64) -> Result<CMat> {
        self.check(sigma)?;
        let local = self.basis.adjoint() * sigma * &self.basis;
        let scaled = local.zip_map(&self.kernel, f);
        Ok(&self.basis * scaled * self.basis.adjoint())
    }

    pub fn apply(&self, sigma: &CMat) -> Result<CMat> {
        self.transform(sigma, |s, k| s * k)
    }

    pub fn inverse(&self, tau: &CMat) -> Result<CMat> {
        self.transform(tau, |s, k| s / k)
    }

    /// `tr(A† Ω(B))`.
    pub fn form(&self, a: &CMat, b: &CMat) -> Result<C64> {
        self.check(a)?;
        Ok(hs_inner(a, &self.apply(b)?))
    }

    /// `U† X U` in the eigenbasis of `ρ`.
    pub fn to_local(&self, x: &CMat) -> Result<CMat> {
        self.check(x)?;
        Ok(self.basis.adjoint() * x * &self.basis)
    }

    /// [`Self::form`] for operators already in the eigenbasis.
    pub fn local_form(&self, a: &CMat, b: &CMat) -> C64 {
        a.iter().zip(b.iter()).zip(self.kernel.iter()).map(|((x, y), k)| x.conj() * k * y).sum()
    }
}

pub fn omega_apply(rho: &DensityMatrix, metric: &AlphaMetric, sigma: &CMat) -> Result<CMat> {
    LocalMetric::new(rho, metric)?.apply(sigma)
}

pub fn omega_inverse(rho: &DensityMatrix, metric: &AlphaMetric, tau: &CMat) -> Result<CMat> {
    LocalMetric::new(rho, metric)?.inverse(tau)
}

/// `M_ρ(A, B) = tr(A† Ω_ρ(B))`.
pub fn metric_form(rho: &DensityMatrix, metric: &AlphaMetric, a: &CMat, b: &CMat) -> Result<C64> {
    LocalMetric::new(rho, metric)?.form(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, hermitian_function};

    fn sample_state() -> DensityMatrix {
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.1, 0.05),
                C64::new(0.0, -0.02),
                C64::new(0.1, -0.05),
                C64::new(0.3, 0.0),
                C64::new(0.04, 0.0),
                C64::new(0.0, 0.02),
                C64::new(0.04, 0.0),
                C64::new(0.2, 0.0),
            ],
        );
        DensityMatrix::new(m).unwrap()
    }

    fn sample_sigma() -> CMat {
        CMat::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64 * 0.1, i as f64 - j as f64))
    }

    #[test]
    fn validation() {
        assert!(AlphaMetric::single(1.5).is_err());
        assert!(AlphaMetric::convex(&[(0.5, 0.2), (0.4, 0.3)]).is_err());
        assert!(AlphaMetric::convex(&[(1.2, 0.2), (-0.2, 0.3)]).is_err());
        assert!(AlphaMetric::convex(&[]).is_err());
        let pure = DensityMatrix::new(CMat::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0)
        ])))
        .unwrap();
        assert!(matches!(LocalMetric::new(&pure, &AlphaMetric::single(0.5).unwrap()), Err(Error::SingularState(_))));
    }

    #[test]
    fn scalar_spectrum() {
        let rho = DensityMatrix::maximally_mixed(3);
        let s = sample_sigma();
        for a in [0.0, 0.3, 1.0] {
            let m = AlphaMetric::single(a).unwrap();
            assert!(frobenius(&(omega_apply(&rho, &m, &s).unwrap() - &s * C64::new(3.0, 0.0))) < 1e-12);
            assert!(frobenius(&(omega_inverse(&rho, &m, &s).unwrap() - &s / C64::new(3.0, 0.0))) < 1e-12);
        }
    }

    #[test]
    fn state_maps_to_identity() {
        let rho = sample_state();
        let m = AlphaMetric::single(0.3).unwrap();
        let id = CMat::identity(3, 3);
        assert!(frobenius(&(omega_apply(&rho, &m, rho.matrix()).unwrap() - &id)) < 1e-12);
        assert!(frobenius(&(omega_inverse(&rho, &m, &id).unwrap() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn half_alpha_matches_matrix_powers() {
        let rho = sample_state();
        let s = sample_sigma();
        let r = hermitian_function(rho.matrix(), |p| p.powf(-0.5));
        let expected = &r * &s * &r;
        let got = omega_apply(&rho, &AlphaMetric::single(0.5).unwrap(), &s).unwrap();
        assert!(frobenius(&(got - expected)) < 1e-10);
    }

    #[test]
    fn round_trip_and_form() {
        let rho = sample_state();
        let s = sample_sigma();
        let m = AlphaMetric::convex(&[(0.25, 0.1), (0.75, 0.8)]).unwrap();
        let lm = LocalMetric::new(&rho, &m).unwrap();
        assert!(frobenius(&(lm.apply(&lm.inverse(&s).unwrap()).unwrap() - &s)) < 1e-10);
        let z = CMat::zeros(3, 3);
        assert_eq!(lm.form(&z, &z).unwrap(), C64::new(0.0, 0.0));
    }
}
