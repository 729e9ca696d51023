//! Seeded random instances: states, covariance matrices, channels and
//! generators. All draws go through the caller's RNG so results are
//! reproducible from a seed.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::error::Result;
use crate::fock::DensityMatrix;
use crate::gaussian::CovarianceMatrix;
use crate::linalg::{eigh, hermitian_function, hermitian_part, trace, CMat, RMat, C64};
use crate::majorana::{mask_indices, PolynomialOperator};
use crate::model::{Jump, LindbladSpec};

/// Standard normal draw (Box-Muller).
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(normal(rng), normal(rng)) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| complex_normal(rng))
}

/// Haar-like random orthogonal matrix from the QR factorization of a Gaussian
/// matrix, with the sign ambiguity of `R`'s diagonal removed.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMat {
    let g = RMat::from_fn(n, n, |_, _| normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random real antisymmetric matrix with standard normal upper entries.
pub fn random_antisymmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMat {
    let mut a = RMat::zeros(n, n);
    for k in 0..n {
        for l in k + 1..n {
            let v = normal(rng);
            a[(k, l)] = v;
            a[(l, k)] = -v;
        }
    }
    a
}

/// `Oᵀ (⊕ λ_j J) O` with `λ_j` uniform in `[-lambda_max, lambda_max]`.
pub fn random_covariance<R: Rng + ?Sized>(rng: &mut R, modes: usize, lambda_max: f64) -> CovarianceMatrix {
    let lambdas: Vec<f64> = (0..modes).map(|_| rng.gen_range(-lambda_max..=lambda_max)).collect();
    let o = random_orthogonal(rng, 2 * modes);
    let block = CovarianceMatrix::with_block_values(modes, &lambdas);
    let g = o.transpose() * block.matrix() * &o;
    // antisymmetric up to rounding; keep the upper triangle exactly
    let upper: Vec<f64> =
        crate::gaussian::upper_pairs(modes).iter().map(|&(k, l)| 0.5 * (g[(k, l)] - g[(l, k)])).collect();
    CovarianceMatrix::from_upper(modes, &upper).expect("rotated standard form is physical")
}

/// Random Hermitian matrix (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    hermitian_part(&gaussian_matrix(rng, n))
}

/// Random Hermitian matrix with zero trace.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let h = random_hermitian(rng, n);
    let t = trace(&h) / n as f64;
    &h - CMat::identity(n, n) * t
}

/// Full-rank state `G G† / tr(G G†)` mixed with a little of `I/n`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, n);
    let w = &g * g.adjoint();
    let w = &w / trace(&w) * C64::new(0.95, 0.0) + CMat::identity(n, n) * C64::new(0.05 / n as f64, 0.0);
    DensityMatrix::from_matrix_normalized(&hermitian_part(&w)).expect("positive by construction")
}

/// Kraus operators `K_i S^{-1/2}` with `S = Σ K_i† K_i`, so `Σ K_i† K_i = I`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> Vec<CMat> {
    let raw: Vec<CMat> = (0..count).map(|_| gaussian_matrix(rng, n)).collect();
    let s = raw.iter().fold(CMat::zeros(n, n), |acc, k| acc + k.adjoint() * k);
    let s_inv_half = hermitian_function(&hermitian_part(&s), |v| 1.0 / v.sqrt());
    raw.iter().map(|k| k * &s_inv_half).collect()
}

/// `Σ_i K_i X K_i†`.
pub fn apply_channel(kraus: &[CMat], x: &CMat) -> CMat {
    kraus.iter().fold(CMat::zeros(x.nrows(), x.ncols()), |acc, k| acc + k * x * k.adjoint())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    eigh(m).0.first().copied().unwrap_or(0.0)
}

/// Hermitian even polynomial of degree `≤ max_degree` (2 or 4) with normal
/// coefficients on every canonical monomial. The prefactor `i^{p}` on degree-2p
/// monomials makes each real coefficient Hermitian.
pub fn random_even_hermitian<R: Rng + ?Sized>(
    rng: &mut R,
    modes: usize,
    max_degree: usize,
    scale: f64,
) -> PolynomialOperator {
    let n = 2 * modes as u32;
    let mut poly = PolynomialOperator::zero(modes);
    for mask in 1u64..(1u64 << n) {
        let d = mask.count_ones() as usize;
        if d % 2 == 1 || d > max_degree {
            continue;
        }
        // (c_S)† = (-1)^{d(d-1)/2} c_S: anti-Hermitian exactly when d ≡ 2 mod 4
        let phase = if d % 4 == 2 { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) };
        poly.add_term(mask, phase * (scale * normal(rng)));
    }
    poly
}

/// Random linear combination of Majorana monomials of one fixed degree.
pub fn random_homogeneous<R: Rng + ?Sized>(rng: &mut R, modes: usize, degree: usize, scale: f64) -> PolynomialOperator {
    let n = 2 * modes as u32;
    let mut poly = PolynomialOperator::zero(modes);
    for mask in 1u64..(1u64 << n) {
        if mask.count_ones() as usize == degree {
            poly.add_term(mask, complex_normal(rng) * scale);
        }
    }
    poly
}

/// Quartic Hermitian Hamiltonian plus `jump_count` jumps, each either purely
/// linear or purely quadratic, with rates in `(0, max_rate]`.
pub fn random_lindblad<R: Rng + ?Sized>(
    rng: &mut R,
    modes: usize,
    jump_count: usize,
    max_rate: f64,
) -> Result<LindbladSpec> {
    let h = random_even_hermitian(rng, modes, 4, 0.5);
    let jumps = (0..jump_count)
        .map(|_| {
            let degree = if rng.gen::<bool>() { 1 } else { 2 };
            let operator = random_homogeneous(rng, modes, degree, 0.5);
            let rate = max_rate * (1.0 - rng.gen::<f64>());
            Jump { operator, rate }
        })
        .collect();
    LindbladSpec::new(h, jumps)
}

/// Uniformly random canonical monomial of the given degree on `2·modes` Majoranas.
pub fn random_monomial<R: Rng + ?Sized>(rng: &mut R, modes: usize, degree: usize) -> Vec<usize> {
    let n = 2 * modes;
    let mut mask = 0u64;
    while (mask.count_ones() as usize) < degree.min(n) {
        mask |= 1u64 << rng.gen_range(0..n);
    }
    mask_indices(mask)
}
