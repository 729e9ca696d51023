//! Dense Fock-space oracle.
//!
//! `N` fermionic modes are represented on `2^N` basis states through the
//! Jordan-Wigner map `a_j = (∏_{k<j} Z_k)(X_j + iY_j)/2`. Basis index `b`
//! encodes occupations as bits (`bit j` set means mode `j` is occupied), so
//! index 0 is the vacuum and `Z_k = (-1)^{n_k}`.
//!
//! Everything here is brute force on purpose: the other modules are checked
//! against these routines.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_part, hermiticity_defect, is_psd_within, CMat, RMat, SparseOp, C64, I, ONE, ZERO};
use crate::majorana::{mask_indices, PolynomialOperator};
use crate::model::LindbladSpec;
use crate::ode::{rk4_step, TimeGrid, Trajectory};

/// Default limit on dense mode counts (`dim = 4096`).
pub const DEFAULT_DENSE_CAP: usize = 12;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
/// Allowed trace drift over an integrated run.
pub const TRACE_DRIFT_TOL: f64 = 1e-9;
/// Relative gap below which the lowest eigenvalue counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// The Fock space of a fixed number of modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpace {
    modes: usize,
}

impl FockSpace {
    pub fn new(modes: usize) -> Result<Self> {
        Self::with_cap(modes, DEFAULT_DENSE_CAP)
    }

    pub fn with_cap(modes: usize, cap: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        if modes > cap {
            return Err(Error::DenseCapExceeded { modes, cap });
        }
        Ok(Self { modes })
    }

    /// The space whose dimension is `dim`, which must be a power of two.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotFockDimension(dim));
        }
        Self::new(dim.trailing_zeros() as usize)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        1 << self.modes
    }

    /// Image of basis state `b` under the canonical monomial `mask`:
    /// `c_mask |b⟩ = phase |target⟩`.
    pub fn monomial_action(&self, mask: u64, basis: usize) -> (usize, C64) {
        let mut b = basis;
        let mut phase = ONE;
        // rightmost factor acts first
        for &k in mask_indices(mask).iter().rev() {
            let j = k / 2;
            let below = b & ((1usize << j) - 1);
            if below.count_ones() % 2 == 1 {
                phase = -phase;
            }
            if k % 2 == 1 {
                phase *= if b & (1 << j) == 0 { -I } else { I };
            }
            b ^= 1 << j;
        }
        (b, phase)
    }

    pub fn monomial(&self, mask: u64) -> SparseOp {
        SparseOp::from_triplets(
            self.dim(),
            (0..self.dim()).map(|b| {
                let (t, phase) = self.monomial_action(mask, b);
                (t, b, phase)
            }),
        )
    }

    pub fn majorana(&self, k: usize) -> Result<SparseOp> {
        if k >= 2 * self.modes {
            return Err(Error::IndexOutOfRange { index: k, modes: self.modes });
        }
        Ok(self.monomial(1 << k))
    }

    /// Sparse realization of a Majorana polynomial.
    pub fn realize(&self, poly: &PolynomialOperator) -> Result<SparseOp> {
        if poly.modes() != self.modes {
            return Err(Error::DimensionMismatch { expected: self.modes, found: poly.modes() });
        }
        let dim = self.dim();
        let mut triplets = Vec::with_capacity(poly.len() * dim);
        for (mask, coeff) in poly.iter() {
            for b in 0..dim {
                let (t, phase) = self.monomial_action(mask, b);
                triplets.push((t, b, coeff * phase));
            }
        }
        Ok(SparseOp::from_triplets(dim, triplets))
    }

    /// Annihilation operator built directly from the Jordan-Wigner string.
    pub fn annihilator(&self, j: usize) -> Result<SparseOp> {
        if j >= self.modes {
            return Err(Error::IndexOutOfRange { index: 2 * j, modes: self.modes });
        }
        let triplets = (0..self.dim()).filter(|b| b & (1 << j) != 0).map(|b| {
            let string = if (b & ((1 << j) - 1)).count_ones().is_multiple_of(2) { ONE } else { -ONE };
            (b ^ (1 << j), b, string)
        });
        Ok(SparseOp::from_triplets(self.dim(), triplets))
    }

    /// Pure Fock state with the listed modes occupied.
    pub fn occupation_state(&self, occupied: &[usize]) -> Result<DensityMatrix> {
        let mut b = 0usize;
        for &j in occupied {
            if j >= self.modes {
                return Err(Error::IndexOutOfRange { index: 2 * j, modes: self.modes });
            }
            b |= 1 << j;
        }
        let mut m = CMat::zeros(self.dim(), self.dim());
        m[(b, b)] = ONE;
        Ok(DensityMatrix(m))
    }

    pub fn vacuum(&self) -> DensityMatrix {
        let mut m = CMat::zeros(self.dim(), self.dim());
        m[(0, 0)] = ONE;
        DensityMatrix(m)
    }

    /// `M_kl = i tr(c_k c_l X)` for `k < l`, antisymmetrized, zero diagonal.
    ///
    /// For a state this is the covariance matrix `(i/2) tr([c_k, c_l] ρ)`; for a
    /// tangent operator it is the induced change of the covariance matrix.
    pub fn second_moments(&self, op: &CMat) -> Result<RMat> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.nrows() });
        }
        let n = 2 * self.modes;
        let mut out = RMat::zeros(n, n);
        for k in 0..n {
            for l in k + 1..n {
                let mask = (1u64 << k) | (1u64 << l);
                let mut tr = ZERO;
                for b in 0..self.dim() {
                    let (t, phase) = self.monomial_action(mask, b);
                    tr += phase * op[(b, t)];
                }
                let v = (I * tr).re;
                out[(k, l)] = v;
                out[(l, k)] = -v;
            }
        }
        Ok(out)
    }
}

/// The `2N` Majorana operators as dense Hermitian matrices, built from the
/// annihilators: `c_{2j} = a_j + a†_j`, `c_{2j+1} = -i(a†_j - a_j)`.
pub fn build_majoranas(modes: usize) -> Result<Vec<CMat>> {
    let space = FockSpace::new(modes)?;
    let mut out = Vec::with_capacity(2 * modes);
    for j in 0..modes {
        let a = space.annihilator(j)?.to_dense();
        let ad = a.adjoint();
        out.push(&a + &ad);
        out.push((&ad - &a) * (-I));
    }
    Ok(out)
}

/// Dense, Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMat);

impl DensityMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        linalg::check_square(m.nrows(), m.ncols())?;
        linalg::check_finite(&m)?;
        let defect = hermiticity_defect(&m);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = linalg::trace(&m).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { expected: 1.0, found: tr });
        }
        if !is_psd_within(&m, PSD_TOL) {
            return Err(Error::NotPositive(-PSD_TOL));
        }
        Ok(Self(m))
    }

    /// Hermitizes and renormalizes before validating.
    pub fn from_matrix_normalized(m: &CMat) -> Result<Self> {
        let h = hermitian_part(m);
        let tr = linalg::trace(&h).re;
        if !(tr.abs() > 0.0) {
            return Err(Error::BadTrace { expected: 1.0, found: tr });
        }
        Self::new(h / C64::new(tr, 0.0))
    }

    pub(crate) fn from_unchecked(m: CMat) -> Self {
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMat::identity(dim, dim) / C64::new(dim as f64, 0.0))
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let n = psi.len();
        Ok(Self(CMat::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / norm)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.0).re
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigh(&self.0).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `tr(ρ X)` for a sparse operator.
    pub fn expectation(&self, op: &SparseOp) -> C64 {
        op.trace_with(&self.0)
    }
}

/// Dense traceless Hermitian operator, an element of the tangent space.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentOperator(CMat);

/// Tangent checks are relative to the operator scale.
pub const TANGENT_TOL: f64 = 1e-8;

impl TangentOperator {
    pub fn new(m: CMat) -> Result<Self> {
        linalg::check_square(m.nrows(), m.ncols())?;
        linalg::check_finite(&m)?;
        let scale = linalg::frobenius(&m).max(1.0);
        let defect = hermiticity_defect(&m);
        if defect > TANGENT_TOL * scale {
            return Err(Error::NotHermitian(defect));
        }
        let tr = linalg::trace(&m);
        if tr.norm() > TRACE_TOL * scale {
            return Err(Error::BadTrace { expected: 0.0, found: tr.re });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_unchecked(m: CMat) -> Self {
        Self(m)
    }

    pub fn zero(dim: usize) -> Self {
        Self(CMat::zeros(dim, dim))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// A Lindblad generator realized on a dense Fock space.
///
/// Stores the effective Hamiltonian `H_eff = H - (i/2) Σ κ j†j` so that
/// `L(ρ) = X + X† + Σ κ j ρ j†` with `X = -i H_eff ρ`.
#[derive(Clone, Debug)]
pub struct DenseLindblad {
    dim: usize,
    hamiltonian: SparseOp,
    effective: SparseOp,
    jumps: Vec<(SparseOp, f64)>,
}

impl DenseLindblad {
    pub fn from_spec(spec: &LindbladSpec) -> Result<Self> {
        let space = FockSpace::new(spec.modes())?;
        let h = space.realize(spec.hamiltonian())?;
        let jumps =
            spec.jumps().iter().map(|j| Ok((space.realize(&j.operator)?, j.rate))).collect::<Result<Vec<_>>>()?;
        Self::from_operators(h, jumps)
    }

    /// From explicit operators on any dimension.
    pub fn from_operators(hamiltonian: SparseOp, jumps: Vec<(SparseOp, f64)>) -> Result<Self> {
        let dim = hamiltonian.dim();
        let defect = hamiltonian.hermiticity_defect();
        if defect > HERMITIAN_TOL * linalg::frobenius(&hamiltonian.to_dense()).max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        let mut effective = hamiltonian.clone();
        for (j, rate) in &jumps {
            if j.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: j.dim() });
            }
            if !(*rate >= 0.0) || !rate.is_finite() {
                return Err(Error::NegativeRate(*rate));
            }
            let jdj = j.adjoint().mul(j);
            effective = effective.add(&jdj.scale(C64::new(0.0, -0.5 * rate)));
        }
        let jumps = jumps.into_iter().filter(|(_, r)| *r > 0.0).collect();
        Ok(Self { dim, hamiltonian, effective, jumps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &SparseOp {
        &self.hamiltonian
    }

    /// `L(ρ)` for any square matrix of matching dimension.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let n = self.dim;
        let x = self.effective.mul_dense(rho);
        let mut out = CMat::zeros(n, n);
        {
            let xs = x.as_slice();
            let dst = out.as_mut_slice();
            // -i X + (-i X)†
            for j in 0..n {
                for i in 0..n {
                    dst[i + j * n] = (xs[j + i * n].conj() - xs[i + j * n]) * I;
                }
            }
        }
        for (j, rate) in &self.jumps {
            j.add_sandwich(rho, *rate, &mut out);
        }
        out
    }
}

/// `L(ρ)` as a tangent operator.
pub fn lindblad_rhs(generator: &DenseLindblad, rho: &DensityMatrix) -> Result<TangentOperator> {
    if rho.dim() != generator.dim() {
        return Err(Error::DimensionMismatch { expected: generator.dim(), found: rho.dim() });
    }
    Ok(TangentOperator::from_unchecked(hermitian_part(&generator.apply(rho.matrix()))))
}

/// Fixed-step RK4 integration of `∂_t ρ = L(ρ)`.
///
/// The state is hermitized after every step. Each sample is checked for trace
/// drift (`< 1e-9` against `ρ0`) and positivity (`λ_min ≥ -1e-9`); a breach
/// aborts the run.
pub fn integrate_exact(
    generator: &DenseLindblad,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<Trajectory<DensityMatrix>> {
    if rho0.dim() != generator.dim() {
        return Err(Error::DimensionMismatch { expected: generator.dim(), found: rho0.dim() });
    }
    let tr0 = rho0.trace();
    let mut traj = Trajectory::new();
    let mut rho = rho0.matrix().clone();
    traj.push(0.0, rho0.clone());
    for step in 1..=grid.steps() {
        let next = rk4_step(&rho, grid.dt(), |r: &CMat| Ok(generator.apply(r)))?;
        rho = hermitian_part(&next);
        if grid.is_sample(step) {
            let t = grid.time_at(step);
            linalg::check_finite(&rho).map_err(|_| Error::IntegrationAborted {
                time: t,
                reason: "non-finite state; step too large".into(),
            })?;
            let drift = (linalg::trace(&rho).re - tr0).abs();
            if drift > TRACE_DRIFT_TOL {
                return Err(Error::IntegrationAborted {
                    time: t,
                    reason: format!("trace drift {drift:e}; step too large"),
                });
            }
            if !is_psd_within(&rho, PSD_TOL) {
                return Err(Error::IntegrationAborted {
                    time: t,
                    reason: "negative eigenvalue; step too large".into(),
                });
            }
            traj.push(t, DensityMatrix::from_unchecked(rho.clone()));
        }
    }
    Ok(traj)
}

/// Projector onto the lowest eigenvector of a Hermitian matrix.
///
/// A lowest eigenvalue degenerate to `1e-10` (relative to the spectral scale)
/// is an error rather than an arbitrary choice inside the eigenspace.
pub fn ground_state(h: &CMat) -> Result<DensityMatrix> {
    linalg::check_square(h.nrows(), h.ncols())?;
    linalg::check_finite(h)?;
    let scale = linalg::frobenius(h).max(1.0);
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect));
    }
    let (vals, vecs) = linalg::eigh(&hermitian_part(h));
    if vals.len() > 1 {
        let gap = vals[1] - vals[0];
        if gap < DEGENERACY_TOL * vals[0].abs().max(1.0) {
            return Err(Error::DegenerateGroundState(gap));
        }
    }
    let psi: Vec<C64> = vecs.column(0).iter().copied().collect();
    DensityMatrix::pure(&psi)
}

/// Which matrix norm the subscript-2 distance uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormKind {
    /// Hilbert-Schmidt / Frobenius.
    #[default]
    Frobenius,
    /// Largest singular value.
    Spectral,
}

/// Frobenius norm of `a - b`.
pub fn hs_distance(a: &CMat, b: &CMat) -> Result<f64> {
    operator_distance(a, b, NormKind::Frobenius)
}

pub fn operator_distance(a: &CMat, b: &CMat, kind: NormKind) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    let d = a - b;
    Ok(match kind {
        NormKind::Frobenius => linalg::frobenius(&d),
        NormKind::Spectral => linalg::spectral_norm(&d),
    })
}

pub fn real_distance(a: &RMat, b: &RMat, kind: NormKind) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    let d = a - b;
    Ok(match kind {
        NormKind::Frobenius => linalg::frobenius_real(&d),
        NormKind::Spectral => linalg::spectral_norm_real(&d),
    })
}
