//! Pfaffians of real antisymmetric matrices.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{antisymmetry_defect, RMat};

pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// Pfaffian by skew-symmetric `L T Lᵀ` elimination with partial pivoting.
///
/// Each step pivots the largest entry of the current column below the
/// diagonal into the sub-diagonal position (one row/column swap, one sign
/// flip), then eliminates the rest of the column with a rank-2 skew update.
/// `O(m³)`.
pub fn pfaffian(a: &RMat) -> Result<f64> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::NotSquare { rows: n, cols: a.ncols() });
    }
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let defect = antisymmetry_defect(a);
    if defect > ANTISYMMETRY_TOL * scale {
        return Err(Error::NotAntisymmetric(defect));
    }
    Ok(pfaffian_unchecked(a.clone()))
}

pub(crate) fn pfaffian_unchecked(mut a: RMat) -> f64 {
    let n = a.nrows();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let mut pivot = k + 1;
        let mut best = a[(k + 1, k)].abs();
        for r in k + 2..n {
            if a[(r, k)].abs() > best {
                best = a[(r, k)].abs();
                pivot = r;
            }
        }
        if pivot != k + 1 {
            a.swap_rows(k + 1, pivot);
            a.swap_columns(k + 1, pivot);
            pf = -pf;
        }
        let akk1 = a[(k, k + 1)];
        if akk1 == 0.0 {
            return 0.0;
        }
        pf *= akk1;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / akk1).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Pfaffian of the principal submatrix of `g` on `idx` (increasing) by
/// expansion along the first row. Intended for the small submatrices of Wick
/// contractions; larger index sets fall back to elimination.
pub(crate) fn sub_pfaffian(g: &RMat, idx: &[usize]) -> f64 {
    match idx.len() {
        0 => 1.0,
        2 => g[(idx[0], idx[1])],
        4 => {
            let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
            g[(a, b)] * g[(c, d)] - g[(a, c)] * g[(b, d)] + g[(a, d)] * g[(b, c)]
        }
        m if m % 2 == 1 => 0.0,
        m if m <= 8 => {
            let first = idx[0];
            let mut rest = [0usize; 8];
            let mut total = 0.0;
            for j in 1..m {
                let entry = g[(first, idx[j])];
                if entry == 0.0 {
                    continue;
                }
                let mut len = 0;
                for (p, &v) in idx.iter().enumerate().skip(1) {
                    if p != j {
                        rest[len] = v;
                        len += 1;
                    }
                }
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                total += sign * entry * sub_pfaffian(g, &rest[..len]);
            }
            total
        }
        m => pfaffian_unchecked(RMat::from_fn(m, m, |r, c| g[(idx[r], idx[c])])),
    }
}
