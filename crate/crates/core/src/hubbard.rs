//! One-dimensional spinful Hubbard chain with spin-flip decoherence.
//!
//! `H = J Σ_{x,s} (a†_{x,s} a_{x+1,s} + h.c.) + u Σ_x n_{x↑} n_{x↓} + μ Σ_{x,s} n_{x,s}`
//! with jumps `j_x = a†_{x↑} a_{x↓}` at rate `κ`. Site `x` (0-based) and spin
//! `s` (↑ = 0, ↓ = 1) live on mode `2x + s`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockSpace};
use crate::gaussian::{polynomial_expectation, CovarianceMatrix};
use crate::linalg::C64;
use crate::majorana::{to_majorana_polynomial, FermionTerm, Ladder, PolynomialOperator};
use crate::model::{Jump, LindbladSpec};

pub const UP: usize = 0;
pub const DOWN: usize = 1;

pub fn mode(site: usize, spin: usize) -> usize {
    2 * site + spin
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HubbardParams {
    pub sites: usize,
    pub hopping: f64,
    pub interaction: f64,
    pub chemical_potential: f64,
    pub kappa: f64,
    pub periodic: bool,
}

impl Default for HubbardParams {
    /// Four periodic sites at `J = 1, u = 4, μ = -2, κ = 1`.
    fn default() -> Self {
        Self { sites: 4, hopping: 1.0, interaction: 4.0, chemical_potential: -2.0, kappa: 1.0, periodic: true }
    }
}

impl HubbardParams {
    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::InvalidParameter(alloc::format!("need at least 2 sites, got {}", self.sites)));
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::NegativeRate(self.kappa));
        }
        for (name, v) in [
            ("hopping", self.hopping),
            ("interaction", self.interaction),
            ("chemical_potential", self.chemical_potential),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        2 * self.sites
    }

    /// Nearest-neighbour bonds `(x, x+1)`; the periodic bond `(L-1, 0)` is
    /// included literally, so `L = 2` periodic counts its bond twice.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut b: Vec<(usize, usize)> = (0..self.sites - 1).map(|x| (x, x + 1)).collect();
        if self.periodic {
            b.push((self.sites - 1, 0));
        }
        b
    }
}

/// Hamiltonian and jump operators as Majorana polynomials.
pub fn build_hubbard(params: &HubbardParams) -> Result<LindbladSpec> {
    params.validate()?;
    let modes = params.modes();
    let real = |v: f64| C64::new(v, 0.0);
    let mut terms = Vec::new();
    for (x, y) in params.bonds() {
        for s in [UP, DOWN] {
            let hop = FermionTerm::new(
                real(params.hopping),
                alloc::vec![Ladder::create(mode(x, s)), Ladder::annihilate(mode(y, s))],
            );
            terms.push(hop.adjoint());
            terms.push(hop);
        }
    }
    for x in 0..params.sites {
        let (up, dn) = (mode(x, UP), mode(x, DOWN));
        terms.push(FermionTerm::new(
            real(params.interaction),
            alloc::vec![Ladder::create(up), Ladder::annihilate(up), Ladder::create(dn), Ladder::annihilate(dn)],
        ));
        for m in [up, dn] {
            terms.push(FermionTerm::new(
                real(params.chemical_potential),
                alloc::vec![Ladder::create(m), Ladder::annihilate(m)],
            ));
        }
    }
    let h = to_majorana_polynomial(modes, &terms)?.pruned(0.0);
    let jumps = (0..params.sites)
        .map(|x| {
            let op = to_majorana_polynomial(
                modes,
                &[FermionTerm::new(
                    real(1.0),
                    alloc::vec![Ladder::create(mode(x, UP)), Ladder::annihilate(mode(x, DOWN))],
                )],
            )?;
            Ok(Jump { operator: op, rate: params.kappa })
        })
        .collect::<Result<Vec<_>>>()?;
    LindbladSpec::new(h, jumps)
}

/// `N = Σ_m n_m`.
pub fn total_number(modes: usize) -> Result<PolynomialOperator> {
    let mut n = PolynomialOperator::zero(modes);
    for m in 0..modes {
        n = &n + &PolynomialOperator::number(modes, m)?;
    }
    Ok(n)
}

/// `∏_x a†_{x↑} |0⟩` as a dense state.
pub fn polarized_state(sites: usize) -> Result<DensityMatrix> {
    let occupied: Vec<usize> = (0..sites).map(|x| mode(x, UP)).collect();
    FockSpace::new(2 * sites)?.occupation_state(&occupied)
}

/// Covariance matrix of `∏_x a†_{x↑} |0⟩`: `Γ_{2m,2m+1} = 1 - 2 n_m`.
pub fn polarized_covariance(sites: usize) -> CovarianceMatrix {
    let values: Vec<f64> = (0..2 * sites).map(|m| if m % 2 == UP { -1.0 } else { 1.0 }).collect();
    CovarianceMatrix::with_block_values(2 * sites, &values)
}

/// A state whose diagnostics can be read off, either dense or Gaussian.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Dense(&'a DensityMatrix),
    Gaussian(&'a CovarianceMatrix),
}

impl StateRef<'_> {
    fn modes(&self) -> Result<usize> {
        match self {
            StateRef::Dense(rho) => Ok(FockSpace::from_dim(rho.dim())?.modes()),
            StateRef::Gaussian(cm) => Ok(cm.modes()),
        }
    }

    /// `⟨∏_{m ∈ modes} n_m⟩` for distinct modes.
    fn number_product(&self, modes: &[usize]) -> Result<f64> {
        match self {
            // number operators are diagonal in the occupation basis
            StateRef::Dense(rho) => {
                let mask: usize = modes.iter().map(|&m| 1usize << m).sum();
                Ok((0..rho.dim()).filter(|b| b & mask == mask).map(|b| rho.matrix()[(b, b)].re).sum())
            }
            StateRef::Gaussian(cm) => {
                let mut p = PolynomialOperator::constant(cm.modes(), C64::new(1.0, 0.0));
                for &m in modes {
                    p = &p * &PolynomialOperator::number(cm.modes(), m)?;
                }
                Ok(polynomial_expectation(cm, &p)?.re)
            }
        }
    }
}

/// Per-site occupations and their spin totals.
#[derive(Clone, Debug, PartialEq)]
pub struct Occupations {
    pub up: Vec<f64>,
    pub down: Vec<f64>,
    pub n_up: f64,
    pub n_down: f64,
}

pub fn occupations(state: StateRef<'_>) -> Result<Occupations> {
    let modes = state.modes()?;
    if modes % 2 == 1 {
        return Err(Error::OddDimension(modes));
    }
    let sites = modes / 2;
    let up = (0..sites).map(|x| state.number_product(&[mode(x, UP)])).collect::<Result<Vec<_>>>()?;
    let down = (0..sites).map(|x| state.number_product(&[mode(x, DOWN)])).collect::<Result<Vec<_>>>()?;
    let n_up = up.iter().sum();
    let n_down = down.iter().sum();
    Ok(Occupations { up, down, n_up, n_down })
}

/// Local spin densities, nearest-neighbour `S^z` correlator and staggered
/// magnetization.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOrder {
    /// `s_x = (n_{x↑} - n_{x↓}) / 2`
    pub spin: Vec<f64>,
    /// `C₁ = (1/#bonds) Σ_{(x,y)} ⟨S^z_x S^z_y⟩`
    pub c1: f64,
    /// `m_s = (1/L) Σ_x (-1)^{x+1} s_x`, 0-based `x`
    pub staggered: f64,
}

pub fn spin_order(state: StateRef<'_>, periodic: bool) -> Result<SpinOrder> {
    let occ = occupations(state)?;
    let sites = occ.up.len();
    let spin: Vec<f64> = occ.up.iter().zip(&occ.down).map(|(u, d)| 0.5 * (u - d)).collect();
    let params = HubbardParams { sites, periodic, ..HubbardParams::default() };
    if sites < 2 {
        return Err(Error::InvalidParameter("spin order needs at least 2 sites".into()));
    }
    let bonds = params.bonds();
    let mut c1 = 0.0;
    for &(x, y) in &bonds {
        // 4 S^z_x S^z_y = Σ_{s,t} σ_s σ_t n_{x,s} n_{y,t}
        let mut acc = 0.0;
        for s in [UP, DOWN] {
            for t in [UP, DOWN] {
                let sign = if s == t { 1.0 } else { -1.0 };
                acc += sign * state.number_product(&[mode(x, s), mode(y, t)])?;
            }
        }
        c1 += 0.25 * acc;
    }
    c1 /= bonds.len() as f64;
    let staggered = spin.iter().enumerate().map(|(x, s)| if x % 2 == 0 { -s } else { *s }).sum::<f64>() / sites as f64;
    Ok(SpinOrder { spin, c1, staggered })
}
