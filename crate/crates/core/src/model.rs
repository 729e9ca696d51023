//! Symbolic Lindblad generators.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::majorana::PolynomialOperator;

/// Polynomial Hamiltonians must be Hermitian to this coefficient tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A jump operator `j` with rate `κ` contributing `κ (j ρ j† - ½{j†j, ρ})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jump {
    pub operator: PolynomialOperator,
    pub rate: f64,
}

/// Generator `L(ρ) = -i[H, ρ] + Σ κ (j ρ j† - ½{j†j, ρ})`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladSpec {
    modes: usize,
    hamiltonian: PolynomialOperator,
    jumps: Vec<Jump>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: PolynomialOperator, jumps: Vec<Jump>) -> Result<Self> {
        let modes = hamiltonian.modes();
        if modes == 0 {
            return Err(Error::NoModes);
        }
        let defect = hamiltonian.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        for jump in &jumps {
            if jump.operator.modes() != modes {
                return Err(Error::DimensionMismatch { expected: modes, found: jump.operator.modes() });
            }
            if !(jump.rate >= 0.0) || !jump.rate.is_finite() {
                return Err(Error::NegativeRate(jump.rate));
            }
        }
        Ok(Self { modes, hamiltonian, jumps })
    }

    /// Purely Hamiltonian dynamics.
    pub fn closed(hamiltonian: PolynomialOperator) -> Result<Self> {
        Self::new(hamiltonian, Vec::new())
    }

    /// `L ≡ 0` on `modes` modes.
    pub fn trivial(modes: usize) -> Result<Self> {
        Self::new(PolynomialOperator::zero(modes), Vec::new())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn hamiltonian(&self) -> &PolynomialOperator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Same generator with `H → H + shift·1`.
    pub fn with_energy_shift(&self, shift: f64) -> Self {
        let h = &self.hamiltonian + &PolynomialOperator::constant(self.modes, C64::new(shift, 0.0));
        Self { modes: self.modes, hamiltonian: h, jumps: self.jumps.clone() }
    }

    /// Heisenberg-picture adjoint `L†(X) = i[H, X] + Σ κ (j† X j - ½{j†j, X})`,
    /// so that `tr(X L(ρ)) = tr(L†(X) ρ)`.
    pub fn adjoint_apply(&self, x: &PolynomialOperator) -> PolynomialOperator {
        let mut out = self.hamiltonian.commutator(x).scale(C64::new(0.0, 1.0));
        for jump in &self.jumps {
            if jump.rate == 0.0 {
                continue;
            }
            let jd = jump.operator.adjoint();
            let sandwich = &(&jd * x) * &jump.operator;
            let anti = (&jd * &jump.operator).anticommutator(x).scale(C64::new(0.5, 0.0));
            out = &out + &(&sandwich - &anti).scale(C64::new(jump.rate, 0.0));
        }
        out
    }

    pub fn check_modes(&self, modes: usize) -> Result<()> {
        if modes != self.modes {
            return Err(Error::DimensionMismatch { expected: self.modes, found: modes });
        }
        Ok(())
    }

    /// Rejects generators above the given polynomial degrees.
    pub fn check_degrees(&self, hamiltonian_cap: usize, jump_cap: usize) -> Result<()> {
        let d = self.hamiltonian.degree();
        if d > hamiltonian_cap {
            return Err(Error::DegreeOverflow { degree: d, cap: hamiltonian_cap });
        }
        for jump in &self.jumps {
            let d = jump.operator.degree();
            if d > jump_cap {
                return Err(Error::DegreeOverflow { degree: d, cap: jump_cap });
            }
        }
        Ok(())
    }
}
