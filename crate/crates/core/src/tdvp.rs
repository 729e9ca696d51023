//! Mixed-state time-dependent variational principle.
//!
//! For a chart `x ↦ ρ(x)` and metric `Ω_ρ`, the locally optimal velocity
//! minimizes `M_ρ(A - L(ρ), A - L(ρ))` over `A = v^j ∂_j ρ`, which gives
//! `G v = l` with `G_jk = ⟨∂_j ρ, Ω(∂_k ρ)⟩` and `l_j = ⟨∂_j ρ, Ω(L(ρ))⟩`.

use alloc::boxed::Box;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fock::{DenseLindblad, DensityMatrix, TangentOperator};
use crate::gaussian::{covariance_tangents, dense_from_covariance_expansion, param_count, CovarianceMatrix};
use crate::linalg::{hermitian_part, trace, CMat, RMat, C64};
use crate::metrics::{AlphaMetric, LocalMetric};
use crate::ode::{rk4_step, TimeGrid, Trajectory};

/// Relative eigenvalue cutoff of the Gram pseudo-inverse.
pub const PSEUDO_INVERSE_CUTOFF: f64 = 1e-10;
/// Integration aborts once `cond(G)` exceeds this.
pub const MAX_CONDITION: f64 = 1e12;
/// Central-difference step of [`FiniteDifferenceChart`].
pub const FD_STEP: f64 = 1e-5;
/// Gaussian charts reject states with `1 - |λ_j|` below this.
pub const PURITY_MARGIN: f64 = 1e-8;

/// A parametrized family of density matrices with tangent access.
///
/// Implementations must be reentrant.
pub trait ManifoldChart {
    fn param_dim(&self) -> usize;

    fn state(&self, x: &[f64]) -> Result<DensityMatrix>;

    /// `∂_j ρ(x)` for every `j`, in order.
    fn tangents(&self, x: &[f64]) -> Result<Vec<TangentOperator>>;

    fn tangent(&self, x: &[f64], j: usize) -> Result<TangentOperator> {
        let d = self.param_dim();
        self.tangents(x)?.into_iter().nth(j).ok_or(Error::IndexOutOfRange { index: j, modes: d })
    }

    fn check_params(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.param_dim() {
            return Err(Error::DimensionMismatch { expected: self.param_dim(), found: x.len() });
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }
}

/// Orthonormal traceless Hermitian basis of `n × n` matrices (generalized
/// Gell-Mann, Hilbert-Schmidt normalized), `n² - 1` elements.
pub fn traceless_hermitian_basis(n: usize) -> Vec<CMat> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut sym = CMat::zeros(n, n);
            sym[(j, k)] = C64::new(s, 0.0);
            sym[(k, j)] = C64::new(s, 0.0);
            out.push(sym);
            let mut asym = CMat::zeros(n, n);
            asym[(j, k)] = C64::new(0.0, -s);
            asym[(k, j)] = C64::new(0.0, s);
            out.push(asym);
        }
    }
    for l in 1..n {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut d = CMat::zeros(n, n);
        for m in 0..l {
            d[(m, m)] = C64::new(norm, 0.0);
        }
        d[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        out.push(d);
    }
    out
}

/// All full-rank density matrices: `ρ(x) = I/n + Σ_j x_j B_j`.
#[derive(Clone, Debug)]
pub struct FullChart {
    dim: usize,
    basis: Vec<CMat>,
}

impl FullChart {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter("full chart needs dimension at least 2".into()));
        }
        Ok(Self { dim, basis: traceless_hermitian_basis(dim) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `x_j = tr(B_j ρ)`.
    pub fn coordinates(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.dim() });
        }
        Ok(self.basis.iter().map(|b| crate::linalg::trace_product(b, rho.matrix()).re).collect())
    }
}

impl ManifoldChart for FullChart {
    fn param_dim(&self) -> usize {
        self.basis.len()
    }

    fn state(&self, x: &[f64]) -> Result<DensityMatrix> {
        self.check_params(x)?;
        let n = self.dim;
        let mut m = CMat::identity(n, n) / C64::new(n as f64, 0.0);
        for (b, &v) in self.basis.iter().zip(x) {
            m += b * C64::new(v, 0.0);
        }
        DensityMatrix::new(m)
    }

    fn tangents(&self, x: &[f64]) -> Result<Vec<TangentOperator>> {
        self.check_params(x)?;
        Ok(self.basis.iter().cloned().map(TangentOperator::from_unchecked).collect())
    }
}

/// Fermionic Gaussian states with coordinates `x` = strict upper triangle of
/// `Γ` (see [`crate::gaussian::upper_pairs`]).
#[derive(Clone, Copy, Debug)]
pub struct GaussianChart {
    modes: usize,
}

impl GaussianChart {
    pub fn new(modes: usize) -> Result<Self> {
        crate::fock::FockSpace::new(modes)?;
        Ok(Self { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn covariance(&self, x: &[f64]) -> Result<CovarianceMatrix> {
        self.check_params(x)?;
        let cm = CovarianceMatrix::from_upper(self.modes, x)?;
        cm.check_mixed(PURITY_MARGIN)?;
        Ok(cm)
    }
}

impl ManifoldChart for GaussianChart {
    fn param_dim(&self) -> usize {
        param_count(self.modes)
    }

    fn state(&self, x: &[f64]) -> Result<DensityMatrix> {
        let cm = self.covariance(x)?;
        DensityMatrix::from_matrix_normalized(&dense_from_covariance_expansion(&cm)?)
    }

    fn tangents(&self, x: &[f64]) -> Result<Vec<TangentOperator>> {
        let cm = self.covariance(x)?;
        covariance_tangents(&cm)?.into_iter().map(TangentOperator::new).collect()
    }
}

type StateFn = dyn Fn(&[f64]) -> Result<DensityMatrix> + Send + Sync;

/// Any state map, with tangents from central differences and an explicit
/// traceless Hermitian projection.
pub struct FiniteDifferenceChart {
    param_dim: usize,
    step: f64,
    map: Box<StateFn>,
}

impl FiniteDifferenceChart {
    pub fn new(param_dim: usize, map: impl Fn(&[f64]) -> Result<DensityMatrix> + Send + Sync + 'static) -> Self {
        Self { param_dim, step: FD_STEP, map: Box::new(map) }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }
}

impl ManifoldChart for FiniteDifferenceChart {
    fn param_dim(&self) -> usize {
        self.param_dim
    }

    fn state(&self, x: &[f64]) -> Result<DensityMatrix> {
        self.check_params(x)?;
        (self.map)(x)
    }

    fn tangents(&self, x: &[f64]) -> Result<Vec<TangentOperator>> {
        self.check_params(x)?;
        (0..self.param_dim)
            .map(|j| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[j] += self.step;
                xm[j] -= self.step;
                let d =
                    ((self.map)(&xp)?.into_matrix() - (self.map)(&xm)?.into_matrix()) / C64::new(2.0 * self.step, 0.0);
                let d = hermitian_part(&d);
                let n = d.nrows();
                let t = trace(&d) / n as f64;
                Ok(TangentOperator::from_unchecked(d - CMat::identity(n, n) * t))
            })
            .collect()
    }
}

/// Solution of the projected equations at one point.
#[derive(Clone, Debug)]
pub struct TdvpSolution {
    pub v: Vec<f64>,
    pub gram: RMat,
    pub force: Vec<f64>,
    /// `M(A - L, A - L)` for `A = v^j ∂_j ρ`.
    pub residual: f64,
    /// Some Gram eigenvalue fell below the pseudo-inverse cutoff.
    pub singular: bool,
    /// `λ_max / λ_min` of the Gram matrix; infinite when `λ_min ≤ 0`.
    pub condition: f64,
}

/// Tangents and `L(ρ)` expressed in the eigenbasis of `ρ`.
struct LocalProblem {
    metric: LocalMetric,
    tangents: Vec<CMat>,
    generator: Option<CMat>,
}

impl LocalProblem {
    fn build(
        chart: &dyn ManifoldChart,
        x: &[f64],
        metric: &AlphaMetric,
        generator: Option<&DenseLindblad>,
    ) -> Result<Self> {
        let rho = chart.state(x)?;
        let local = LocalMetric::new(&rho, metric)?;
        let tangents = chart.tangents(x)?.iter().map(|t| local.to_local(t.matrix())).collect::<Result<Vec<_>>>()?;
        let generator = match generator {
            Some(g) => Some(local.to_local(&crate::fock::lindblad_rhs(g, &rho)?.into_matrix())?),
            None => None,
        };
        Ok(Self { metric: local, tangents, generator })
    }

    fn gram(&self) -> RMat {
        let d = self.tangents.len();
        let mut g = RMat::zeros(d, d);
        for j in 0..d {
            for k in j..d {
                let v = self.metric.local_form(&self.tangents[j], &self.tangents[k]).re;
                g[(j, k)] = v;
                g[(k, j)] = v;
            }
        }
        g
    }

    fn force(&self) -> Vec<f64> {
        match &self.generator {
            Some(l) => self.tangents.iter().map(|t| self.metric.local_form(t, l).re).collect(),
            None => alloc::vec![0.0; self.tangents.len()],
        }
    }
}

/// `G_jk = Re⟨∂_j ρ, Ω_ρ(∂_k ρ)⟩`.
pub fn gram_matrix(chart: &dyn ManifoldChart, x: &[f64], metric: &AlphaMetric) -> Result<RMat> {
    Ok(LocalProblem::build(chart, x, metric, None)?.gram())
}

/// `l_j = Re⟨∂_j ρ, Ω_ρ(L(ρ))⟩`.
pub fn force_vector(
    chart: &dyn ManifoldChart,
    x: &[f64],
    metric: &AlphaMetric,
    generator: &DenseLindblad,
) -> Result<Vec<f64>> {
    Ok(LocalProblem::build(chart, x, metric, Some(generator))?.force())
}

/// Minimum-norm solution of `G v = l` by symmetric eigendecomposition.
/// Returns `(v, singular, condition)`.
pub fn solve_gram(gram: &RMat, force: &[f64]) -> Result<(Vec<f64>, bool, f64)> {
    let d = gram.nrows();
    if force.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: force.len() });
    }
    if d == 0 {
        return Ok((Vec::new(), false, 1.0));
    }
    if !gram.iter().chain(force).all(|v| v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let eig = SymmetricEigen::new(gram.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    let cutoff = PSEUDO_INVERSE_CUTOFF * max;
    let l = DVector::from_column_slice(force);
    let mut v = DVector::zeros(d);
    let mut singular = false;
    for (i, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu > cutoff && mu > 0.0 {
            let u = eig.eigenvectors.column(i);
            v += u * (u.dot(&l) / mu);
        } else {
            singular = true;
        }
    }
    Ok((v.iter().copied().collect(), singular, condition))
}

/// Locally optimal velocity `v = G⁺ l` with its diagnostics.
pub fn tdvp_velocity(
    chart: &dyn ManifoldChart,
    x: &[f64],
    metric: &AlphaMetric,
    generator: &DenseLindblad,
) -> Result<TdvpSolution> {
    let problem = LocalProblem::build(chart, x, metric, Some(generator))?;
    let gram = problem.gram();
    let force = problem.force();
    let (v, singular, condition) = solve_gram(&gram, &force)?;
    let l = problem.generator.as_ref().expect("generator supplied");
    let mut diff = -l.clone();
    for (t, &vj) in problem.tangents.iter().zip(&v) {
        diff += t * C64::new(vj, 0.0);
    }
    let residual = problem.metric.local_form(&diff, &diff).re.max(0.0);
    Ok(TdvpSolution { v, gram, force, residual, singular, condition })
}

/// `M(X, X)` at `ρ(x)` for an arbitrary operator.
pub fn metric_norm_sq(chart: &dyn ManifoldChart, x: &[f64], metric: &AlphaMetric, op: &CMat) -> Result<f64> {
    let rho = chart.state(x)?;
    let local = LocalMetric::new(&rho, metric)?;
    let o = local.to_local(op)?;
    Ok(local.local_form(&o, &o).re)
}

/// RK4 integration of `ẋ = v(x)`.
///
/// Every right-hand-side evaluation revalidates the state through the chart
/// and aborts once `cond(G) > 1e12`.
pub fn integrate_tdvp(
    chart: &dyn ManifoldChart,
    x0: &[f64],
    metric: &AlphaMetric,
    generator: &DenseLindblad,
    grid: &TimeGrid,
) -> Result<Trajectory<Vec<f64>>> {
    chart.check_params(x0)?;
    let mut traj = Trajectory::new();
    let mut x = x0.to_vec();
    traj.push(0.0, x.clone());
    for step in 1..=grid.steps() {
        let t = grid.time_at(step - 1);
        let abort = |reason: alloc::string::String| Error::IntegrationAborted { time: t, reason };
        x = rk4_step(&x, grid.dt(), |y: &Vec<f64>| {
            let sol = tdvp_velocity(chart, y, metric, generator).map_err(|e| abort(alloc::format!("{e}")))?;
            if sol.condition > MAX_CONDITION {
                return Err(abort(alloc::format!("Gram condition number {:e}", sol.condition)));
            }
            Ok(sol.v)
        })?;
        if grid.is_sample(step) {
            chart
                .state(&x)
                .map_err(|e| Error::IntegrationAborted { time: grid.time_at(step), reason: alloc::format!("{e}") })?;
            traj.push(grid.time_at(step), x.clone());
        }
    }
    Ok(traj)
}
