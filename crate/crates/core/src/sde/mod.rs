//! Sample paths of
//!
//! ```text
//! dx(t) = x(t) [ (r(t) - a(t) x(t)) dt + σ(t) dB(t) ]
//! ```
//!
//! together with the deterministic logistic equation (`σ ≡ 0`) and the
//! comparison equation used to bound the p-th moment.
//!
//! Coefficients are evaluated at the left end of each step (Itô
//! convention). The default scheme integrates `ln x`, which keeps every
//! state strictly positive; the direct scheme on `x` is kept for
//! convergence diagnostics and absorbs paths that step to or below zero.

mod em;
mod noise;
mod ode;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::CoeffError;

pub use em::{
    coupled_pair, simulate, simulate_direct_em, simulate_direct_em_with_noise, simulate_log_em,
    simulate_log_em_with_noise, CoeffTable,
};
pub(crate) use em::{coupled_gap, log_em_path, PathOutcome};
pub use noise::{brownian_increments, mix_seed, BrownianSource, NoiseStream};
pub use ode::{solve_deterministic, solve_moment_ode, MomentSolution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("solution blew up at t={t}")]
    BlowUp { t: f64 },
    #[error("state underflowed to zero at t={t}")]
    Underflow { t: f64 },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Euler–Maruyama on `y = ln x`.
    LogEm,
    /// Euler–Maruyama on `x` with absorption at zero.
    DirectEm,
}

/// Integrator that produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    LogEm,
    DirectEm,
    Rk4,
}

impl From<Scheme> for Method {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::LogEm => Method::LogEm,
            Scheme::DirectEm => Method::DirectEm,
        }
    }
}

/// Largest number of stored points a default config produces.
pub const MAX_DEFAULT_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub x0: f64,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub scheme: Scheme,
    /// Store every `record_stride`-th step; the final step is always stored.
    pub record_stride: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::new(0.5, 1e-3, 500.0, 0)
    }
}

impl SimConfig {
    /// LogEM config with a stride that keeps at most [`MAX_DEFAULT_POINTS`] points.
    pub fn new(x0: f64, dt: f64, t_end: f64, seed: u64) -> Self {
        Self {
            x0,
            dt,
            t_end,
            seed,
            scheme: Scheme::LogEm,
            record_stride: auto_stride(t_end, dt),
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.x0 > 0.0 && self.x0.is_finite()) {
            return Err(SimError::InvalidConfig(format!("x0 must be positive, got {}", self.x0)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite() && self.t_end.is_finite() && self.dt <= self.t_end) {
            return Err(SimError::InvalidConfig(format!(
                "need 0 < dt <= t_end, got dt={} t_end={}",
                self.dt, self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(SimError::InvalidConfig("record_stride must be at least 1".into()));
        }
        self.step_index(self.t_end).map(|_| ())
    }

    /// Number of integration steps from 0 to `t_end`.
    pub fn n_steps(&self) -> Result<usize, SimError> {
        self.step_index(self.t_end)
    }

    /// Index `k` with `k * dt == t`, if `t` lies on the step grid.
    pub fn step_index(&self, t: f64) -> Result<usize, SimError> {
        let k = (t / self.dt).round();
        if t < 0.0 || (k * self.dt - t).abs() > 1e-9 * self.dt.max(t) {
            return Err(SimError::InvalidConfig(format!(
                "time {t} is not a multiple of dt={}",
                self.dt
            )));
        }
        Ok(k as usize)
    }

    pub(crate) fn records(&self, k: usize, n: usize) -> bool {
        k.is_multiple_of(self.record_stride) || k == n
    }
}

fn auto_stride(t_end: f64, dt: f64) -> usize {
    if !(dt > 0.0 && t_end > 0.0) {
        return 1;
    }
    let n = (t_end / dt).round() as usize;
    n.div_ceil(MAX_DEFAULT_POINTS).max(1)
}

/// A recorded path: times, states and the noise integral `M(t) = ∫_0^t σ dB`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    pub noise_integral: Vec<f64>,
    pub method: Method,
    pub seed: u64,
    /// First time the direct scheme stepped to a nonpositive value.
    pub absorbed_at: Option<f64>,
}

impl Trajectory {
    pub(crate) fn with_capacity(n: usize, method: Method, seed: u64) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            noise_integral: Vec::with_capacity(n),
            method,
            seed,
            absorbed_at: None,
        }
    }

    pub(crate) fn push(&mut self, t: f64, x: f64, m: f64) {
        self.times.push(t);
        self.states.push(x);
        self.noise_integral.push(m);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> f64 {
        *self.states.last().expect("trajectory has at least the initial point")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial point")
    }

    /// Writes `t,x,M` CSV. Floats use the shortest representation that
    /// reads back to the same value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x,M")?;
        for ((t, x), m) in self.times.iter().zip(&self.states).zip(&self.noise_integral) {
            writeln!(out, "{t},{x},{m}")?;
        }
        Ok(())
    }
}
