//! Fermionic Gaussian states described by their covariance matrix
//! `Γ_kl = (i/2) tr([c_k, c_l] ρ)`.
//!
//! Expectations of Majorana monomials follow from Wick's theorem,
//! `tr(ρ c_{j1} … c_{j2p}) = (-i)^p Pf(Γ_{j1…j2p})` for increasing indices.
//! The dense state can be rebuilt either from the standard form
//! `ρ = ∏_j ½(1 + iλ_j c̃_{2j} c̃_{2j+1})` with `c̃ = O c`, or from the Majorana
//! expansion `ρ = 2^{-N} Σ_S i^{|S|/2} Pf(Γ_S) c_S`, which is polynomial in the
//! entries of `Γ` and therefore gives exact derivatives `∂ρ/∂Γ_kl`.

use alloc::vec::Vec;
use nalgebra::Schur;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockSpace};
use crate::linalg::{antisymmetry_defect, eigh_real, hermitian_part, CMat, RMat, C64, I, ZERO};
use crate::majorana::{i_pow, reduce_indices, MajoranaMonomial, PolynomialOperator};
use crate::pfaffian::{sub_pfaffian, ANTISYMMETRY_TOL};

/// Eigenvalues of `iΓ` may exceed 1 in magnitude by this much.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Residual bound for the standard-form block diagonalization.
pub const STANDARD_FORM_TOL: f64 = 1e-9;

/// Number of independent covariance parameters, `N(2N-1)`.
pub fn param_count(modes: usize) -> usize {
    modes * (2 * modes - 1)
}

/// Strictly-upper-triangle index pairs `(k, l)`, row by row.
pub fn upper_pairs(modes: usize) -> Vec<(usize, usize)> {
    let n = 2 * modes;
    let mut out = Vec::with_capacity(param_count(modes));
    for k in 0..n {
        for l in k + 1..n {
            out.push((k, l));
        }
    }
    out
}

/// `max_j |λ_j|`, read off the spectrum of `ΓᵀΓ`.
fn max_abs_lambda(gamma: &RMat) -> f64 {
    let g2 = gamma.transpose() * gamma;
    let (vals, _) = eigh_real(&g2);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Real antisymmetric `2N × 2N` covariance matrix of a fermionic state.
///
/// Antisymmetry is exact: the lower triangle is always the negated upper one.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    modes: usize,
    gamma: RMat,
}

impl CovarianceMatrix {
    /// Validates antisymmetry (to 1e-12) and physicality (`|λ_j| ≤ 1 + 1e-9`).
    pub fn new(gamma: RMat) -> Result<Self> {
        let cm = Self::from_matrix(gamma)?;
        let lam = cm.max_abs_lambda();
        if lam > 1.0 + PHYSICALITY_TOL {
            return Err(Error::Unphysical(lam));
        }
        Ok(cm)
    }

    /// Antisymmetric but possibly unphysical.
    pub(crate) fn from_matrix(gamma: RMat) -> Result<Self> {
        let n = gamma.nrows();
        if n != gamma.ncols() {
            return Err(Error::NotSquare { rows: n, cols: gamma.ncols() });
        }
        if n == 0 {
            return Err(Error::NoModes);
        }
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        if !gamma.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = antisymmetry_defect(&gamma);
        if defect > ANTISYMMETRY_TOL {
            return Err(Error::NotAntisymmetric(defect));
        }
        Ok(Self::antisymmetrized(gamma))
    }

    fn antisymmetrized(mut gamma: RMat) -> Self {
        let n = gamma.nrows();
        for k in 0..n {
            gamma[(k, k)] = 0.0;
            for l in k + 1..n {
                gamma[(l, k)] = -gamma[(k, l)];
            }
        }
        Self { modes: n / 2, gamma }
    }

    /// From the packed strict upper triangle (see [`upper_pairs`]).
    pub fn from_upper(modes: usize, upper: &[f64]) -> Result<Self> {
        Self::new(Self::from_upper_unchecked(modes, upper)?.gamma)
    }

    pub(crate) fn from_upper_unchecked(modes: usize, upper: &[f64]) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        if upper.len() != param_count(modes) {
            return Err(Error::DimensionMismatch { expected: param_count(modes), found: upper.len() });
        }
        let n = 2 * modes;
        let mut gamma = RMat::zeros(n, n);
        for (&(k, l), &v) in upper_pairs(modes).iter().zip(upper) {
            gamma[(k, l)] = v;
        }
        Ok(Self::antisymmetrized(gamma))
    }

    /// `Γ = 0`, the maximally mixed state.
    pub fn zero(modes: usize) -> Self {
        Self { modes, gamma: RMat::zeros(2 * modes, 2 * modes) }
    }

    /// The Fock vacuum, `Γ = ⊕ [[0, 1], [-1, 0]]`.
    pub fn vacuum(modes: usize) -> Self {
        Self::with_block_values(modes, &alloc::vec![1.0; modes])
    }

    /// `Γ_{2j, 2j+1} = values[j]`, zero elsewhere; `1 - 2⟨n_j⟩` per mode.
    pub fn with_block_values(modes: usize, values: &[f64]) -> Self {
        let mut gamma = RMat::zeros(2 * modes, 2 * modes);
        for (j, &v) in values.iter().enumerate().take(modes) {
            gamma[(2 * j, 2 * j + 1)] = v;
            gamma[(2 * j + 1, 2 * j)] = -v;
        }
        Self { modes, gamma }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &RMat {
        &self.gamma
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.gamma[(k, l)]
    }

    /// Packed strict upper triangle.
    pub fn upper(&self) -> Vec<f64> {
        upper_pairs(self.modes).iter().map(|&(k, l)| self.gamma[(k, l)]).collect()
    }

    pub fn max_abs_lambda(&self) -> f64 {
        max_abs_lambda(&self.gamma)
    }

    /// `(1 - w) self + w other`; physical whenever both inputs are.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch { expected: self.modes, found: other.modes });
        }
        Self::new(&self.gamma * (1.0 - w) + &other.gamma * w)
    }

    /// Rejects states with `1 - |λ_j| < margin`.
    pub fn check_mixed(&self, margin: f64) -> Result<()> {
        let lam = self.max_abs_lambda();
        if 1.0 - lam < margin {
            return Err(Error::SingularState(1.0 - lam));
        }
        Ok(())
    }
}

/// Orthogonal `O` and `λ` with `O Γ Oᵀ = ⊕_j λ_j [[0, 1], [-1, 0]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardForm {
    pub orthogonal: RMat,
    pub lambdas: Vec<f64>,
}

impl StandardForm {
    /// `⊕_j λ_j [[0, 1], [-1, 0]]`.
    pub fn block_matrix(&self) -> RMat {
        let n = 2 * self.lambdas.len();
        let mut b = RMat::zeros(n, n);
        for (j, &l) in self.lambdas.iter().enumerate() {
            b[(2 * j, 2 * j + 1)] = l;
            b[(2 * j + 1, 2 * j)] = -l;
        }
        b
    }

    /// `Oᵀ (⊕ λ_j J) O`.
    pub fn reconstruct(&self) -> RMat {
        self.orthogonal.transpose() * self.block_matrix() * &self.orthogonal
    }

    /// Largest entry of `O Γ Oᵀ - ⊕ λ_j J`.
    pub fn residual(&self, gamma: &RMat) -> f64 {
        let d = &self.orthogonal * gamma * self.orthogonal.transpose() - self.block_matrix();
        d.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Block-diagonalizes `Γ` through its real Schur form.
///
/// `λ_j ≥ 0` is enforced by swapping the two rows of a block, and blocks are
/// ordered by decreasing `λ`.
pub fn standard_form(cm: &CovarianceMatrix) -> Result<StandardForm> {
    let gamma = cm.matrix();
    let n = gamma.nrows();
    let schur = Schur::try_new(gamma.clone(), 1e-15, 10_000).ok_or(Error::StandardForm(f64::INFINITY))?;
    let (q, t) = schur.unpack();
    let scale = gamma.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut singles: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].abs() > 1e-14 * scale {
            pairs.push((i, i + 1));
            i += 2;
        } else {
            singles.push(i);
            i += 1;
        }
    }
    if singles.len() % 2 == 1 {
        return Err(Error::StandardForm(f64::INFINITY));
    }
    for s in singles.chunks(2) {
        pairs.push((s[0], s[1]));
    }
    let mut blocks: Vec<(f64, usize, usize)> = pairs
        .into_iter()
        .map(|(a, b)| {
            let lam = (q.column(a).transpose() * gamma * q.column(b))[(0, 0)];
            if lam < 0.0 {
                (-lam, b, a)
            } else {
                (lam, a, b)
            }
        })
        .collect();
    blocks.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut o = RMat::zeros(n, n);
    let mut lambdas = Vec::with_capacity(n / 2);
    for (j, &(lam, a, b)) in blocks.iter().enumerate() {
        o.set_row(2 * j, &q.column(a).transpose());
        o.set_row(2 * j + 1, &q.column(b).transpose());
        lambdas.push(lam);
    }
    let sf = StandardForm { orthogonal: o, lambdas };
    let residual = sf.residual(gamma);
    if !(residual < STANDARD_FORM_TOL) {
        return Err(Error::StandardForm(residual));
    }
    Ok(sf)
}

/// Covariance matrix of a dense state.
pub fn covariance_from_dense(rho: &DensityMatrix) -> Result<CovarianceMatrix> {
    let space = FockSpace::from_dim(rho.dim())?;
    CovarianceMatrix::new(space.second_moments(rho.matrix())?)
}

/// The Gaussification map: the covariance matrix of `ρ`, which labels the
/// unique Gaussian state sharing all second moments with it.
pub fn gaussify(rho: &DensityMatrix) -> Result<CovarianceMatrix> {
    covariance_from_dense(rho)
}

/// `tr(ρ_G c_{i1} c_{i2} …)` for any index list; repeats are reduced first.
pub fn wick_expectation(cm: &CovarianceMatrix, indices: &[usize]) -> Result<C64> {
    let (sign, mask) = reduce_indices(indices, 2 * cm.modes())?;
    Ok(monomial_expectation(cm.matrix(), mask) * sign)
}

/// `tr(ρ_G c_S)` for a canonical monomial mask.
pub fn monomial_expectation(gamma: &RMat, mask: u64) -> C64 {
    let degree = mask.count_ones() as usize;
    if degree % 2 == 1 {
        return ZERO;
    }
    let mut idx = [0usize; 64];
    let mut rest = mask;
    let mut len = 0;
    while rest != 0 {
        idx[len] = rest.trailing_zeros() as usize;
        len += 1;
        rest &= rest - 1;
    }
    i_pow(3 * (degree / 2)) * sub_pfaffian(gamma, &idx[..len])
}

/// `tr(ρ_G P)` for a Majorana polynomial.
pub fn polynomial_expectation(cm: &CovarianceMatrix, poly: &PolynomialOperator) -> Result<C64> {
    if poly.modes() != cm.modes() {
        return Err(Error::DimensionMismatch { expected: cm.modes(), found: poly.modes() });
    }
    Ok(poly
        .monomials()
        .map(|MajoranaMonomial { coefficient, mask }| coefficient * monomial_expectation(cm.matrix(), mask))
        .sum())
}

/// `tr(ρ_G²) = ∏_j (1 + λ_j²) / 2`.
pub fn purity_from_cm(cm: &CovarianceMatrix) -> f64 {
    let g2 = cm.matrix().transpose() * cm.matrix();
    let (vals, _) = eigh_real(&g2);
    // each λ_j² appears twice in the spectrum of ΓᵀΓ
    let prod: f64 = vals.iter().map(|&m| 1.0 + m.max(0.0)).product();
    prod.sqrt() / f64::powi(2.0, cm.modes() as i32)
}

/// Dense Gaussian state from the standard form `∏_j ½(1 + iλ_j c̃_{2j} c̃_{2j+1})`.
pub fn dense_from_covariance(cm: &CovarianceMatrix) -> Result<DensityMatrix> {
    let space = FockSpace::new(cm.modes())?;
    let sf = standard_form(cm)?;
    let n = 2 * cm.modes();
    let mut rho: Option<CMat> = None;
    for (j, &lam) in sf.lambdas.iter().enumerate() {
        if lam > 1.0 + PHYSICALITY_TOL {
            return Err(Error::Unphysical(lam));
        }
        let lam = lam.min(1.0);
        // ½(1 + iλ Σ_{a,b} O_{2j,a} O_{2j+1,b} c_a c_b)
        let mut factor = PolynomialOperator::constant(cm.modes(), C64::new(0.5, 0.0));
        for a in 0..n {
            for b in 0..n {
                let w = sf.orthogonal[(2 * j, a)] * sf.orthogonal[(2 * j + 1, b)];
                if w != 0.0 {
                    let term = PolynomialOperator::monomial(cm.modes(), I * (0.5 * lam * w), &[a, b])?;
                    factor = &factor + &term;
                }
            }
        }
        let sparse = space.realize(&factor)?;
        rho = Some(match rho {
            None => sparse.to_dense(),
            Some(r) => sparse.dense_mul(&r),
        });
    }
    let rho = rho.unwrap_or_else(|| CMat::identity(1, 1));
    DensityMatrix::from_matrix_normalized(&hermitian_part(&rho))
}

/// Even subsets of `2N` Majoranas as masks, in increasing order.
fn even_masks(modes: usize) -> impl Iterator<Item = u64> {
    let n = 2 * modes as u32;
    (0u64..(1u64 << n)).filter(|m| m.count_ones() % 2 == 0)
}

fn accumulate_monomial(space: &FockSpace, out: &mut CMat, mask: u64, coefficient: C64) {
    for b in 0..space.dim() {
        let (t, phase) = space.monomial_action(mask, b);
        out[(t, b)] += coefficient * phase;
    }
}

/// Dense Gaussian state from the Majorana expansion. Defined for any
/// antisymmetric `Γ`; the result is a state only when `Γ` is physical.
pub fn dense_from_covariance_expansion(cm: &CovarianceMatrix) -> Result<CMat> {
    let space = FockSpace::new(cm.modes())?;
    let mut rho = CMat::zeros(space.dim(), space.dim());
    let norm = 1.0 / space.dim() as f64;
    for mask in even_masks(cm.modes()) {
        let p = mask.count_ones() as usize / 2;
        let pf = pf_of(cm.matrix(), mask);
        if pf != 0.0 {
            accumulate_monomial(&space, &mut rho, mask, i_pow(p) * (pf * norm));
        }
    }
    Ok(rho)
}

fn pf_of(gamma: &RMat, mask: u64) -> f64 {
    let idx = crate::majorana::mask_indices(mask);
    sub_pfaffian(gamma, &idx)
}

/// Exact tangents `∂ρ/∂Γ_kl` of the expansion, one per upper pair `(k, l)`
/// in [`upper_pairs`] order.
///
/// Uses `∂Pf(A)/∂A_rs = (-1)^{r+s+1} Pf(A without rows/cols r, s)` (1-based
/// positions inside the monomial).
pub fn covariance_tangents(cm: &CovarianceMatrix) -> Result<Vec<CMat>> {
    let space = FockSpace::new(cm.modes())?;
    let pairs = upper_pairs(cm.modes());
    let dim = space.dim();
    let norm = 1.0 / dim as f64;
    let mut out: Vec<CMat> = pairs.iter().map(|_| CMat::zeros(dim, dim)).collect();
    for rest in even_masks(cm.modes()) {
        let pf = pf_of(cm.matrix(), rest);
        if pf == 0.0 {
            continue;
        }
        let p = rest.count_ones() as usize / 2 + 1;
        for (slot, &(k, l)) in pairs.iter().enumerate() {
            let (bk, bl) = (1u64 << k, 1u64 << l);
            if rest & (bk | bl) != 0 {
                continue;
            }
            let below = |x: usize| (rest & ((1u64 << x) - 1)).count_ones();
            let sign = if (below(k) + below(l)) % 2 == 0 { 1.0 } else { -1.0 };
            accumulate_monomial(&space, &mut out[slot], rest | bk | bl, i_pow(p) * (sign * pf * norm));
        }
    }
    Ok(out)
}

/// The infinitesimal Gaussian motions `[ρ, c_k c_l]` and
/// `i{ρ, c_k c_l} - 2Γ_kl ρ` for every `k < l`, in that order per pair.
pub fn gaussian_motion_generators(rho: &DensityMatrix, cm: &CovarianceMatrix) -> Result<Vec<CMat>> {
    let space = FockSpace::from_dim(rho.dim())?;
    if space.modes() != cm.modes() {
        return Err(Error::DimensionMismatch { expected: cm.modes(), found: space.modes() });
    }
    let r = rho.matrix();
    let mut out = Vec::new();
    for (k, l) in upper_pairs(cm.modes()) {
        let q = space.monomial((1u64 << k) | (1u64 << l));
        let qr = q.mul_dense(r);
        let rq = q.dense_mul(r);
        out.push(&rq - &qr);
        out.push((&rq + &qr) * I - r * C64::new(2.0 * cm.get(k, l), 0.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;
    use alloc::vec;

    #[test]
    fn vacuum_covariance() {
        let space = FockSpace::new(1).unwrap();
        let cm = covariance_from_dense(&space.vacuum()).unwrap();
        assert_eq!(cm.matrix(), &RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let rho = dense_from_covariance(&CovarianceMatrix::vacuum(1)).unwrap();
        assert!(frobenius(&(rho.matrix() - space.vacuum().matrix())) < 1e-14);
    }

    #[test]
    fn maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(8);
        assert_eq!(covariance_from_dense(&rho).unwrap(), CovarianceMatrix::zero(3));
        let back = dense_from_covariance(&CovarianceMatrix::zero(3)).unwrap();
        assert!(frobenius(&(back.matrix() - rho.matrix())) < 1e-14);
        assert!((purity_from_cm(&CovarianceMatrix::zero(3)) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn sign_normalization_of_standard_form() {
        let cm = CovarianceMatrix::with_block_values(2, &[0.5, -0.25]);
        let sf = standard_form(&cm).unwrap();
        assert!((sf.lambdas[0] - 0.5).abs() < 1e-15 && (sf.lambdas[1] - 0.25).abs() < 1e-15);
        // O is a signed permutation swapping the second block
        for v in sf.orthogonal.iter() {
            assert!(v.abs() < 1e-12 || (v.abs() - 1.0).abs() < 1e-12);
        }
        assert!(sf.residual(cm.matrix()) < 1e-14);
    }

    #[test]
    fn zero_covariance_standard_form() {
        let sf = standard_form(&CovarianceMatrix::zero(3)).unwrap();
        assert_eq!(sf.lambdas, vec![0.0, 0.0, 0.0]);
        assert!(frobenius_real_id(&sf.orthogonal));
    }

    fn frobenius_real_id(o: &RMat) -> bool {
        let n = o.nrows();
        (o * o.transpose() - RMat::identity(n, n)).iter().all(|v| v.abs() < 1e-12)
    }

    #[test]
    fn two_point_wick() {
        let cm = CovarianceMatrix::with_block_values(2, &[0.3, -0.7]);
        assert_eq!(wick_expectation(&cm, &[0, 1]).unwrap(), C64::new(0.0, -0.3));
        assert_eq!(wick_expectation(&cm, &[1, 0]).unwrap(), C64::new(0.0, 0.3));
        assert_eq!(wick_expectation(&cm, &[2, 2]).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(wick_expectation(&cm, &[0, 1, 2]).unwrap(), ZERO);
        assert!(wick_expectation(&cm, &[4]).is_err());
    }

    #[test]
    fn unphysical_rejected() {
        let g = CovarianceMatrix::with_block_values(1, &[1.5]).gamma;
        assert!(matches!(CovarianceMatrix::new(g), Err(Error::Unphysical(_))));
        let mut g = RMat::zeros(2, 2);
        g[(0, 1)] = 0.5;
        assert!(matches!(CovarianceMatrix::new(g), Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn expansion_matches_product_for_product_states() {
        let cm = CovarianceMatrix::with_block_values(2, &[0.2, -0.6]);
        let a = dense_from_covariance(&cm).unwrap();
        let b = dense_from_covariance_expansion(&cm).unwrap();
        assert!(frobenius(&(a.matrix() - b)) < 1e-14);
    }
}
