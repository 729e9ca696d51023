//! Dense and sparse matrix helpers shared by every module.
//!
//! Dense matrices are `nalgebra` column-major [`DMatrix`]es. [`SparseOp`] is a
//! coordinate-format complex matrix used for Hamiltonians and jump operators,
//! whose Fock-space realizations have very few nonzeros per row.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest entrywise deviation of `m` from Hermiticity.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Largest entrywise deviation of `m` from antisymmetry.
pub fn antisymmetry_defect(m: &RMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] + m[(j, i)]).abs());
        }
    }
    worst
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mut out = m.clone();
    let src = m.as_slice();
    let dst = out.as_mut_slice();
    for j in 0..n {
        for i in 0..=j {
            let v = (src[i + j * n] + src[j + i * n].conj()) * 0.5;
            dst[i + j * n] = v;
            dst[j + i * n] = v.conj();
        }
    }
    out
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for j in 0..n {
        for i in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Hilbert-Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_real(m: &RMat) -> f64 {
    m.iter().map(|z| z * z).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    m.clone().singular_values().iter().fold(0.0f64, |a, &b| a.max(b))
}

pub fn spectral_norm_real(m: &RMat) -> f64 {
    m.clone().singular_values().iter().fold(0.0f64, |a, &b| a.max(b))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigen-decomposition of a real symmetric matrix with eigenvalues ascending.
pub fn eigh_real(m: &RMat) -> (Vec<f64>, RMat) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = RMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Certifies `m + tol·I` is positive definite, i.e. the smallest eigenvalue of
/// the Hermitian matrix `m` is above `-tol`.
///
/// Uses a Cholesky factorization that fails on the first non-positive real
/// pivot.
pub fn is_psd_within(m: &CMat, tol: f64) -> bool {
    let n = m.nrows();
    let a = hermitian_part(m);
    // row-major lower factor, rows contiguous
    let mut l = alloc::vec![ZERO; n * n];
    for j in 0..n {
        let mut d = a[(j, j)].re + tol;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let ljj = d.sqrt();
        l[j * n + j] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut v = a[(i, j)];
            let (ri, rj) = (i * n, j * n);
            for k in 0..j {
                v -= l[ri + k] * l[rj + k].conj();
            }
            l[ri + j] = v / ljj;
        }
    }
    true
}

/// Hermitian matrix function `f(m)` applied through the spectrum.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let n = m.nrows();
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = f(v);
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    &scaled * vecs.adjoint()
}

pub fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(())
}

pub fn check_finite(m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Coordinate-format square complex matrix.
///
/// Entries are unique per `(row, col)` and sorted column-major, which keeps
/// both left and right multiplication against column-major dense matrices on
/// contiguous memory.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, entries: (0..dim).map(|k| (k, k, ONE)).collect() }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates and
    /// dropping exact zeros.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (r, c, v) in triplets {
            debug_assert!(r < dim && c < dim);
            *acc.entry((c, r)).or_insert(ZERO) += v;
        }
        let entries = acc.into_iter().filter(|(_, v)| *v != ZERO).map(|((c, r), v)| (r, c, v)).collect();
        Self { dim, entries }
    }

    pub fn from_dense(m: &CMat) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::new();
        for c in 0..dim {
            for r in 0..dim {
                let v = m[(r, c)];
                if v != ZERO {
                    entries.push((r, c, v));
                }
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(self.dim, self.entries.iter().map(|&(r, c, v)| (r, c, v * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.entries.iter().chain(other.entries.iter()).copied())
    }

    /// Sparse product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut rows_of_other: Vec<Vec<(usize, C64)>> = alloc::vec![Vec::new(); self.dim];
        for &(r, c, v) in &other.entries {
            rows_of_other[r].push((c, v));
        }
        let mut out = Vec::new();
        for &(r, k, a) in &self.entries {
            for &(c, b) in &rows_of_other[k] {
                out.push((r, c, a * b));
            }
        }
        Self::from_triplets(self.dim, out)
    }

    /// `self · m` for a dense `m`.
    pub fn mul_dense(&self, m: &CMat) -> CMat {
        assert_eq!(m.nrows(), self.dim);
        let (n, cols) = (self.dim, m.ncols());
        let mut out = CMat::zeros(n, cols);
        // row-compressed copy so each output element accumulates in a register
        let mut start = alloc::vec![0usize; n + 1];
        for &(r, _, _) in &self.entries {
            start[r + 1] += 1;
        }
        for r in 0..n {
            start[r + 1] += start[r];
        }
        let mut fill = start.clone();
        let mut row_entries = alloc::vec![(0usize, ZERO); self.entries.len()];
        for &(r, k, v) in &self.entries {
            row_entries[fill[r]] = (k, v);
            fill[r] += 1;
        }
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for c in 0..cols {
            let s = &src[c * n..(c + 1) * n];
            let d = &mut dst[c * n..(c + 1) * n];
            for (r, d) in d.iter_mut().enumerate() {
                *d = row_entries[start[r]..start[r + 1]].iter().map(|&(k, v)| v * s[k]).sum();
            }
        }
        out
    }

    /// `m · self` for a dense `m`.
    pub fn dense_mul(&self, m: &CMat) -> CMat {
        assert_eq!(m.ncols(), self.dim);
        let rows = m.nrows();
        let mut out = CMat::zeros(rows, self.dim);
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for &(k, c, v) in &self.entries {
            let s = &src[k * rows..(k + 1) * rows];
            let d = &mut dst[c * rows..(c + 1) * rows];
            for (d, s) in d.iter_mut().zip(s) {
                *d += s * v;
            }
        }
        out
    }

    /// Adds `w · self · m · self†` to `out`.
    pub fn add_sandwich(&self, m: &CMat, w: f64, out: &mut CMat) {
        let n = self.dim;
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for &(r2, c2, v2) in &self.entries {
            let v2 = v2.conj() * w;
            for &(r1, c1, v1) in &self.entries {
                dst[r1 + r2 * n] += v1 * src[c1 + c2 * n] * v2;
            }
        }
    }

    /// `tr(self · m)`.
    pub fn trace_with(&self, m: &CMat) -> C64 {
        self.entries.iter().map(|&(r, c, v)| v * m[(c, r)]).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.to_dense())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CMat {
        CMat::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64 - 2.0, (i as f64) - (j as f64) * 0.5))
    }

    #[test]
    fn sparse_products_match_dense() {
        let a = sample();
        let mut b = sample().adjoint();
        b[(0, 2)] = ZERO;
        let sa = SparseOp::from_dense(&a);
        let sb = SparseOp::from_dense(&b);
        assert!(frobenius(&(sa.mul_dense(&b) - &a * &b)) < 1e-13);
        assert!(frobenius(&(sa.dense_mul(&b) - &b * &a)) < 1e-13);
        assert!(frobenius(&(sa.mul(&sb).to_dense() - &a * &b)) < 1e-13);
        assert!((sa.trace_with(&b) - trace(&(&a * &b))).norm() < 1e-13);
        assert!(frobenius(&(sa.adjoint().to_dense() - a.adjoint())) < 1e-15);
    }

    #[test]
    fn eigh_sorts_and_reconstructs() {
        let a = sample();
        let h = &a + a.adjoint();
        let (vals, vecs) = eigh(&h);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let diag = CMat::from_diagonal(&nalgebra::DVector::from_iterator(3, vals.iter().map(|&v| C64::new(v, 0.0))));
        assert!(frobenius(&(&vecs * diag * vecs.adjoint() - h)) < 1e-12);
    }

    #[test]
    fn psd_certificate() {
        let mut m = CMat::identity(2, 2);
        assert!(is_psd_within(&m, 1e-9));
        m[(1, 1)] = C64::new(-1e-6, 0.0);
        assert!(!is_psd_within(&m, 1e-9));
        assert!(is_psd_within(&m, 1e-5));
    }
}
