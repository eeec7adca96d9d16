//! Kuramoto oscillators coupled through a join network.
//!
//! Dynamics: `dθ_i/dt = ω_i + ε Σ_j A_ij sin(θ_j - θ_i)`, with `A` the dense
//! expansion of a real [`JoinSpec`].
//!
//! If `e^{iθ}` is an eigenvector of `A` for a real eigenvalue, `θ` is an
//! equilibrium of the frequency-free model. On a join of identical real
//! symmetric circulant blocks, the Fourier eigenvectors of the blocks share
//! one eigenvalue `λ_j`, so any phase-rotated combination
//! `Σ_i e^{iφ_i} w_{i,j}` is again an eigenvector with unit-modulus entries.
//! Its phases are the twisted states built by
//! [`KuramotoSystem::build_twisted_equilibrium`].

use std::f64::consts::PI;

use crate::dense::{vec_norm_inf, C64};
use crate::error::{Error, Result};
use crate::join::{JoinSpec, DEFAULT_DENSE_CAP};

/// Phases in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState(pub Vec<f64>);

impl PhaseState {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Every phase mapped into `(-π, π]`.
    pub fn reduced(&self) -> PhaseState {
        PhaseState(self.0.iter().map(|&x| reduce_phase(x)).collect())
    }

    /// Phase-wise equality modulo `2π`.
    pub fn congruent(&self, other: &PhaseState, tol: f64) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(&a, &b)| reduce_phase(a - b).abs() <= tol)
    }
}

/// Maps `x` into `(-π, π]`.
pub fn reduce_phase(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedEquilibrium {
    pub j: usize,
    pub phis: Vec<f64>,
    /// Position `r` of block `i` holds `2π r j / k + φ_i` (not reduced).
    pub theta: PhaseState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumCheck {
    pub is_equilibrium: bool,
    /// `||rhs||_inf`.
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct KuramotoSystem {
    network: JoinSpec,
    adjacency: Vec<f64>,
    n: usize,
    epsilon: f64,
    omega: Vec<f64>,
}

impl KuramotoSystem {
    /// Identical oscillators (`ω = 0`) with coupling strength `epsilon`.
    pub fn new(network: JoinSpec, epsilon: f64) -> Result<Self> {
        Self::with_cap(network, epsilon, DEFAULT_DENSE_CAP)
    }

    pub fn with_cap(network: JoinSpec, epsilon: f64, cap: usize) -> Result<Self> {
        if !network.is_real() {
            return Err(Error::Precondition("Kuramoto networks need real entries".into()));
        }
        if !epsilon.is_finite() {
            return Err(Error::NonFinite);
        }
        let dense = network.to_dense_capped(cap)?;
        let n = dense.nrows();
        let adjacency = dense.as_slice().iter().map(|x| x.re).collect();
        Ok(Self { network, adjacency, n, epsilon, omega: vec![0.0; n] })
    }

    pub fn with_frequencies(mut self, omega: Vec<f64>) -> Result<Self> {
        if omega.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: omega.len() });
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        self.omega = omega;
        Ok(self)
    }

    pub fn network(&self) -> &JoinSpec {
        &self.network
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.omega
    }

    pub fn adjacency_norm_inf(&self) -> f64 {
        self.adjacency.chunks(self.n).map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `1e-8 * (1 + |ε| ||A||_inf)`.
    pub fn default_tolerance(&self) -> f64 {
        1e-8 * (1.0 + self.epsilon.abs() * self.adjacency_norm_inf())
    }

    fn check_len(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: theta.len() });
        }
        Ok(())
    }

    pub fn rhs(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_len(theta)?;
        Ok(self.rhs_unchecked(theta))
    }

    fn rhs_unchecked(&self, theta: &[f64]) -> Vec<f64> {
        self.adjacency
            .chunks(self.n)
            .zip(theta)
            .zip(&self.omega)
            .map(|((row, &ti), &wi)| {
                let coupling: f64 =
                    row.iter().zip(theta).filter(|(&a, _)| a != 0.0).map(|(&a, &tj)| a * (tj - ti).sin()).sum();
                wi + self.epsilon * coupling
            })
            .collect()
    }

    pub fn check_equilibrium(&self, theta: &[f64], tol: Option<f64>) -> Result<EquilibriumCheck> {
        let residual = self.rhs(theta)?.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let tolerance = tol.unwrap_or_else(|| self.default_tolerance());
        Ok(EquilibriumCheck { is_equilibrium: residual <= tolerance, residual, tolerance })
    }

    /// Twisted state on a join of `d` identical real symmetric circulant
    /// blocks of size `k`: block `i`, position `r` gets `2π r j / k + φ_i`.
    pub fn build_twisted_equilibrium(&self, j: usize, phis: &[f64]) -> Result<TwistedEquilibrium> {
        let blocks = self.network.blocks();
        let first = &blocks[0];
        if blocks.iter().any(|b| b != first) {
            return Err(Error::Precondition("twisted equilibria need identical blocks".into()));
        }
        if !first.is_symmetric() {
            return Err(Error::Precondition("twisted equilibria need a symmetric circulant block".into()));
        }
        let k = first.size();
        if j == 0 || j >= k {
            return Err(Error::Precondition(format!(
                "Fourier index j must lie in 1..={}, got {j}",
                k.saturating_sub(1)
            )));
        }
        if phis.len() != blocks.len() {
            return Err(Error::DimensionMismatch { expected: blocks.len(), found: phis.len() });
        }
        if phis.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let theta =
            phis.iter().flat_map(|&phi| (0..k).map(move |r| 2.0 * PI * (r * j) as f64 / k as f64 + phi)).collect();
        Ok(TwistedEquilibrium { j, phis: phis.to_vec(), theta: PhaseState(theta) })
    }

    /// Phases of an eigenvector with unit-modulus-like entries, when the
    /// eigenvalue is real. Returns `None` when those hypotheses fail.
    pub fn eigenvector_equilibrium(&self, v: &[C64], lambda: C64) -> Result<Option<PhaseState>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        let av: Vec<C64> =
            self.adjacency.chunks(self.n).map(|row| row.iter().zip(v).map(|(&a, x)| x * a).sum::<C64>()).collect();
        let r: Vec<C64> = av.iter().zip(v).map(|(a, x)| a - lambda * x).collect();
        let residual = vec_norm_inf(&r);
        let tolerance = 1e-8 * (1.0 + self.adjacency_norm_inf());
        if residual > tolerance {
            return Err(Error::NotAnEigenpair { residual, tolerance });
        }
        if lambda.im.abs() > 1e-10 {
            return Ok(None);
        }
        let moduli: Vec<f64> = v.iter().map(|x| x.norm()).collect();
        let mean = moduli.iter().sum::<f64>() / moduli.len().max(1) as f64;
        if mean <= 1e-8 || moduli.iter().any(|m| (m - mean).abs() > 1e-8) {
            return Ok(None);
        }
        Ok(Some(PhaseState(v.iter().map(|x| x.arg()).collect())))
    }

    /// Fixed-step classical Runge-Kutta from `theta0`, sampled every step.
    pub fn integrate(&self, theta0: &[f64], dt: f64, steps: usize) -> Result<Trajectory> {
        self.check_len(theta0)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Precondition(format!("time step must be positive, got {dt}")));
        }
        if steps == 0 {
            return Err(Error::Precondition("need at least one step".into()));
        }
        if theta0.iter().any(|x| !x.is_finite()) {
            return Err(Error::Divergence { step: 0 });
        }
        let mut states = Vec::with_capacity(steps + 1);
        states.push(theta0.to_vec());
        let mut y = theta0.to_vec();
        for step in 1..=steps {
            y = rk4_step(|s| self.rhs_unchecked(s), &y, dt);
            if y.iter().any(|x| !x.is_finite()) {
                return Err(Error::Divergence { step });
            }
            states.push(y.clone());
        }
        Ok(Trajectory { dt, states })
    }
}

/// One classical RK4 step of `y' = f(y)`.
pub fn rk4_step(f: impl Fn(&[f64]) -> Vec<f64>, y: &[f64], dt: f64) -> Vec<f64> {
    let axpy = |a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(yi, ki)| yi + a * ki).collect() };
    let k1 = f(y);
    let k2 = f(&axpy(dt / 2.0, &k1));
    let k3 = f(&axpy(dt / 2.0, &k2));
    let k4 = f(&axpy(dt, &k3));
    (0..y.len()).map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
}

/// States at `t = 0, dt, 2 dt, ...`, kept unreduced.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dt: f64,
    states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn unreduced(&self, i: usize) -> &[f64] {
        &self.states[i]
    }

    /// State `i` with phases in `(-π, π]`.
    pub fn state(&self, i: usize) -> PhaseState {
        PhaseState(self.states[i].clone()).reduced()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// `max_t ||θ(t) - θ(0)||_inf` on unreduced phases.
    pub fn max_drift(&self) -> f64 {
        let first = &self.states[0];
        self.states.iter().flat_map(|s| s.iter().zip(first).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max)
    }
}
