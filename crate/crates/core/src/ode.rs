//! Fixed-step classical Runge-Kutta integration and sampled trajectories.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::CMat;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 0.05;

/// Integration horizon, step and sampling cadence.
///
/// Both `t_final` and `sample_interval` must be integer multiples of `dt` (to
/// a relative 1e-9); sample times are computed as `step · dt` so they carry no
/// accumulated rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    dt: f64,
    sample_interval: f64,
    steps: usize,
    steps_per_sample: usize,
}

fn multiple_of(total: f64, dt: f64) -> Option<usize> {
    let n = (total / dt).round();
    if n < 0.0 || ((n * dt) - total).abs() > 1e-9 * total.abs().max(dt) {
        None
    } else {
        Some(n as usize)
    }
}

impl TimeGrid {
    pub fn new(t_final: f64, dt: f64, sample_interval: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidTimeGrid("dt must be positive"));
        }
        if !(t_final >= 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidTimeGrid("t_final must be nonnegative"));
        }
        if !(sample_interval >= dt) {
            return Err(Error::InvalidTimeGrid("sample_interval must be at least dt"));
        }
        let steps = multiple_of(t_final, dt).ok_or(Error::InvalidTimeGrid("t_final is not a multiple of dt"))?;
        let steps_per_sample = multiple_of(sample_interval, dt)
            .ok_or(Error::InvalidTimeGrid("sample_interval is not a multiple of dt"))?;
        Ok(Self { t_final, dt, sample_interval, steps, steps_per_sample })
    }

    /// Default step and sampling for a horizon.
    pub fn with_defaults(t_final: f64) -> Result<Self> {
        Self::new(t_final, DEFAULT_DT, DEFAULT_SAMPLE_INTERVAL)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Whether the state after `step` steps is recorded. Step 0 and the final
    /// step always are.
    pub fn is_sample(&self, step: usize) -> bool {
        step.is_multiple_of(self.steps_per_sample) || step == self.steps
    }

    pub fn time_at(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    /// All sample times, in order.
    pub fn sample_times(&self) -> Vec<f64> {
        (0..=self.steps).filter(|&s| self.is_sample(s)).map(|s| self.time_at(s)).collect()
    }
}

/// Time-ordered samples of some state type.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub states: Vec<T>,
}

impl<T> Trajectory<T> {
    pub fn new() -> Self {
        Self { times: Vec::new(), states: Vec::new() }
    }

    pub fn push(&mut self, t: f64, state: T) {
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &T)> {
        self.times.last().copied().zip(self.states.last())
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &T)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

impl<T> Default for Trajectory<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Vector-space operations the integrator needs.
pub trait OdeState: Clone {
    /// `self += h · k`
    fn axpy(&mut self, h: f64, k: &Self);

    /// `self + h · k`
    fn add_scaled(&self, h: f64, k: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(h, k);
        out
    }
}

impl OdeState for CMat {
    fn axpy(&mut self, h: f64, k: &Self) {
        for (a, b) in self.as_mut_slice().iter_mut().zip(k.as_slice()) {
            *a += b * h;
        }
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, h: f64, k: &Self) {
        for (a, b) in self.iter_mut().zip(k) {
            *a += h * b;
        }
    }
}

/// One classical fourth-order Runge-Kutta step of `dy/dt = f(y)`.
pub fn rk4_step<S, F>(y: &S, dt: f64, mut f: F) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
{
    let k1 = f(y)?;
    let k2 = f(&y.add_scaled(0.5 * dt, &k1))?;
    let k3 = f(&y.add_scaled(0.5 * dt, &k2))?;
    let k4 = f(&y.add_scaled(dt, &k3))?;
    let mut out = y.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn grid_rejects_bad_input() {
        assert!(TimeGrid::new(1.0, 0.0, 0.1).is_err());
        assert!(TimeGrid::new(1.0, 0.3, 0.3).is_err());
        assert!(TimeGrid::new(1.0, 0.1, 0.05).is_err());
        assert!(TimeGrid::new(1.0, 0.1, 0.25).is_err());
    }

    #[test]
    fn grid_samples() {
        let g = TimeGrid::new(1.0, 0.1, 0.5).unwrap();
        assert_eq!(g.steps(), 10);
        assert_eq!(g.sample_times(), vec![0.0, 0.5, 1.0]);
        let g = TimeGrid::new(1.0, 0.1, 0.3).unwrap();
        assert_eq!(g.sample_times().len(), 5);
    }

    #[test]
    fn rk4_exponential() {
        let mut y = vec![1.0];
        for _ in 0..100 {
            y = rk4_step(&y, 0.01, |s: &Vec<f64>| Ok(vec![-s[0]])).unwrap();
        }
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-10);
    }
}
