//! Symbolic Majorana polynomials.
//!
//! Mode `j` (0-based) carries the Majorana pair `c_{2j} = a†_j + a_j` and
//! `c_{2j+1} = -i (a†_j - a_j)`. A canonical monomial is a strictly increasing
//! product of distinct Majoranas, stored as a bitmask; products are reduced
//! with `c_k² = 1` and `{c_k, c_l} = 0` using exact integer sign counting.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{C64, I, ONE, ZERO};

/// Polynomials use 64-bit masks, so at most 32 modes.
pub const MAX_POLY_MODES: usize = 32;

/// Sign of `c_A c_B = sign · c_{A xor B}` for canonical monomials `A`, `B`.
#[inline]
pub fn product_sign(a: u64, b: u64) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let k = rest.trailing_zeros();
        swaps += (a >> k >> 1).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign picked up by reversing a monomial of `len` factors, i.e. `c_S† = sign · c_S`.
#[inline]
pub fn reversal_sign(len: u32) -> f64 {
    if (len * len.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Reduces an arbitrary ordered product of Majoranas to `sign · c_mask`.
pub fn reduce_indices(indices: &[usize], n_majoranas: usize) -> Result<(f64, u64)> {
    let mut sign = 1.0;
    let mut mask = 0u64;
    for &k in indices {
        if k >= n_majoranas {
            return Err(Error::IndexOutOfRange { index: k, modes: n_majoranas / 2 });
        }
        let single = 1u64 << k;
        sign *= product_sign(mask, single);
        mask ^= single;
    }
    Ok((sign, mask))
}

/// Indices of a canonical monomial, increasing.
pub fn mask_indices(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    out
}

/// A coefficient times a canonical (strictly increasing) Majorana product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MajoranaMonomial {
    pub coefficient: C64,
    pub mask: u64,
}

impl MajoranaMonomial {
    pub fn indices(&self) -> Vec<usize> {
        mask_indices(self.mask)
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }
}

/// Finite complex linear combination of canonical Majorana monomials.
///
/// Always canonical: keyed by monomial mask, merged, and free of exact zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialOperator {
    modes: usize,
    terms: BTreeMap<u64, C64>,
}

impl PolynomialOperator {
    pub fn zero(modes: usize) -> Self {
        assert!(modes <= MAX_POLY_MODES, "polynomials support at most {MAX_POLY_MODES} modes");
        Self { modes, terms: BTreeMap::new() }
    }

    pub fn constant(modes: usize, value: C64) -> Self {
        let mut p = Self::zero(modes);
        p.add_term(0, value);
        p
    }

    /// `coefficient · c_{i1} c_{i2} …` for any index list, repeats allowed.
    pub fn monomial(modes: usize, coefficient: C64, indices: &[usize]) -> Result<Self> {
        let (sign, mask) = reduce_indices(indices, 2 * modes)?;
        let mut p = Self::zero(modes);
        p.add_term(mask, coefficient * sign);
        Ok(p)
    }

    pub fn majorana(modes: usize, k: usize) -> Result<Self> {
        Self::monomial(modes, ONE, &[k])
    }

    /// `a_j = (c_{2j} - i c_{2j+1}) / 2`.
    pub fn annihilation(modes: usize, j: usize) -> Result<Self> {
        if j >= modes {
            return Err(Error::IndexOutOfRange { index: 2 * j, modes });
        }
        let mut p = Self::zero(modes);
        p.add_term(1 << (2 * j), C64::new(0.5, 0.0));
        p.add_term(1 << (2 * j + 1), C64::new(0.0, -0.5));
        Ok(p)
    }

    /// `a†_j = (c_{2j} + i c_{2j+1}) / 2`.
    pub fn creation(modes: usize, j: usize) -> Result<Self> {
        Ok(Self::annihilation(modes, j)?.adjoint())
    }

    /// `n_j = a†_j a_j`.
    pub fn number(modes: usize, j: usize) -> Result<Self> {
        Ok(&Self::creation(modes, j)? * &Self::annihilation(modes, j)?)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: u64) -> C64 {
        self.terms.get(&mask).copied().unwrap_or(ZERO)
    }

    pub fn add_term(&mut self, mask: u64, value: C64) {
        if value == ZERO {
            return;
        }
        let entry = self.terms.entry(mask).or_insert(ZERO);
        *entry += value;
        if *entry == ZERO {
            self.terms.remove(&mask);
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = MajoranaMonomial> + '_ {
        self.terms.iter().map(|(&mask, &coefficient)| MajoranaMonomial { coefficient, mask })
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, C64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    /// Highest monomial degree; 0 for constants and the empty polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.modes);
        for (&m, &c) in &self.terms {
            out.add_term(m, c * s);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.modes);
        for (&m, &c) in &self.terms {
            out.add_term(m, c.conj() * reversal_sign(m.count_ones()));
        }
        out
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `{self, other}`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// Largest coefficient deviation between `self` and its adjoint.
    pub fn hermiticity_defect(&self) -> f64 {
        let diff = self - &self.adjoint();
        diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops monomials with `|coefficient| <= tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.modes);
        for (&m, &c) in &self.terms {
            if c.norm() > tol {
                out.terms.insert(m, c);
            }
        }
        out
    }

    /// Sum of monomials of even degree.
    pub fn even_part(&self) -> Self {
        let mut out = Self::zero(self.modes);
        for (&m, &c) in &self.terms {
            if m.count_ones() % 2 == 0 {
                out.terms.insert(m, c);
            }
        }
        out
    }
}

impl Add for &PolynomialOperator {
    type Output = PolynomialOperator;
    fn add(self, rhs: Self) -> PolynomialOperator {
        assert_eq!(self.modes, rhs.modes, "mode count mismatch");
        let mut out = self.clone();
        for (&m, &c) in &rhs.terms {
            out.add_term(m, c);
        }
        out
    }
}

impl Sub for &PolynomialOperator {
    type Output = PolynomialOperator;
    fn sub(self, rhs: Self) -> PolynomialOperator {
        assert_eq!(self.modes, rhs.modes, "mode count mismatch");
        let mut out = self.clone();
        for (&m, &c) in &rhs.terms {
            out.add_term(m, -c);
        }
        out
    }
}

impl Neg for &PolynomialOperator {
    type Output = PolynomialOperator;
    fn neg(self) -> PolynomialOperator {
        self.scale(-ONE)
    }
}

impl Mul for &PolynomialOperator {
    type Output = PolynomialOperator;
    fn mul(self, rhs: Self) -> PolynomialOperator {
        assert_eq!(self.modes, rhs.modes, "mode count mismatch");
        let mut out = PolynomialOperator::zero(self.modes);
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &rhs.terms {
                out.add_term(a ^ b, ca * cb * product_sign(a, b));
            }
        }
        out
    }
}

/// A fermionic creation or annihilation operator on one mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ladder {
    pub mode: usize,
    pub creation: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, creation: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self { mode, creation: false }
    }
}

/// A second-quantized term `coefficient · op_1 op_2 … op_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub coefficient: C64,
    pub ops: Vec<Ladder>,
}

impl FermionTerm {
    pub fn new(coefficient: C64, ops: Vec<Ladder>) -> Self {
        Self { coefficient, ops }
    }

    /// Hermitian conjugate of the term.
    pub fn adjoint(&self) -> Self {
        let ops = self.ops.iter().rev().map(|l| Ladder { mode: l.mode, creation: !l.creation }).collect();
        Self { coefficient: self.coefficient.conj(), ops }
    }
}

/// Converts a sum of second-quantized terms into canonical Majorana form.
pub fn to_majorana_polynomial(modes: usize, terms: &[FermionTerm]) -> Result<PolynomialOperator> {
    if modes == 0 {
        return Err(Error::NoModes);
    }
    if modes > MAX_POLY_MODES {
        return Err(Error::DenseCapExceeded { modes, cap: MAX_POLY_MODES });
    }
    let mut total = PolynomialOperator::zero(modes);
    for term in terms {
        if !(term.coefficient.re.is_finite() && term.coefficient.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut product = PolynomialOperator::constant(modes, term.coefficient);
        for op in &term.ops {
            let factor = if op.creation {
                PolynomialOperator::creation(modes, op.mode)?
            } else {
                PolynomialOperator::annihilation(modes, op.mode)?
            };
            product = &product * &factor;
        }
        total = &total + &product;
    }
    Ok(total)
}

/// Phase convention helper: `i^p` for integer `p`.
pub fn i_pow(p: usize) -> C64 {
    match p % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn anticommutation_and_squares() {
        let n = 3;
        for k in 0..2 * n {
            for l in 0..2 * n {
                let ck = PolynomialOperator::majorana(n, k).unwrap();
                let cl = PolynomialOperator::majorana(n, l).unwrap();
                let anti = ck.anticommutator(&cl);
                let expected = if k == l {
                    PolynomialOperator::constant(n, C64::new(2.0, 0.0))
                } else {
                    PolynomialOperator::zero(n)
                };
                assert_eq!(anti, expected);
            }
        }
    }

    #[test]
    fn repeated_index_reduction() {
        // c_2 c_0 c_2 = -c_0 c_2 c_2 = -c_0
        assert_eq!(reduce_indices(&[2, 0, 2], 4).unwrap(), (-1.0, 0b1));
        // c_1 c_0 = -c_0 c_1
        assert_eq!(reduce_indices(&[1, 0], 2).unwrap(), (-1.0, 0b11));
        assert_eq!(reduce_indices(&[3, 3], 4).unwrap(), (1.0, 0));
        assert!(reduce_indices(&[4], 4).is_err());
    }

    #[test]
    fn number_operator_form() {
        // a†a = (1 - i c_0 c_1) / 2
        let n = PolynomialOperator::number(1, 0).unwrap();
        assert_eq!(n.len(), 2);
        assert_eq!(n.coefficient(0), C64::new(0.5, 0.0));
        assert_eq!(n.coefficient(0b11), C64::new(0.0, -0.5));
        assert!(n.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn hopping_has_four_quadratic_monomials() {
        let terms = vec![
            FermionTerm::new(ONE, vec![Ladder::create(0), Ladder::annihilate(1)]),
            FermionTerm::new(ONE, vec![Ladder::create(1), Ladder::annihilate(0)]),
        ];
        let p = to_majorana_polynomial(2, &terms).unwrap();
        // a†_0 a_1 + h.c. = (i/2)(c_1 c_2 - c_0 c_3); the one-way term alone has four
        assert_eq!(p.len(), 2);
        assert_eq!(p.coefficient(0b0110), C64::new(0.0, 0.5));
        assert_eq!(p.coefficient(0b1001), C64::new(0.0, -0.5));
        assert_eq!(to_majorana_polynomial(2, &terms[..1]).unwrap().len(), 4);
        assert_eq!(p.degree(), 2);
        assert!(p.hermiticity_defect() < 1e-15);
        assert!(to_majorana_polynomial(2, &[]).unwrap().is_empty());
    }

    #[test]
    fn adjoint_reverses_order() {
        let p = PolynomialOperator::monomial(2, C64::new(1.0, 2.0), &[0, 1, 2]).unwrap();
        // (c0 c1 c2)† = c2 c1 c0 = -c0 c1 c2
        assert_eq!(p.adjoint().coefficient(0b111), C64::new(-1.0, 2.0));
    }
}
