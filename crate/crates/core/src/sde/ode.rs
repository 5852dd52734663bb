//! Classical fourth-order Runge–Kutta for logistic-type ODEs
//! `dz/dt = z (g(t) - a(t) z)`.

use crate::coeff::{CoeffExpr, SystemSpec};

use super::{Method, SimConfig, SimError, Trajectory};

const BLOW_UP: f64 = 1e300;

#[derive(Debug)]
struct Rk4Run {
    trajectory: Trajectory,
    running_max: f64,
}

fn rk4_logistic(
    growth: &CoeffExpr,
    a: &CoeffExpr,
    cfg: &SimConfig,
) -> Result<Rk4Run, SimError> {
    if !(cfg.x0 > 0.0 && cfg.x0.is_finite()) {
        return Err(SimError::InvalidConfig(format!("x0 must be positive, got {}", cfg.x0)));
    }
    cfg.validate()?;
    let n = cfg.n_steps()?;
    let dt = cfg.dt;
    let rhs = |t: f64, z: f64| -> Result<f64, SimError> {
        let g = growth.eval(t).map_err(|e| SimError::Coeff(e.into()))?;
        let a = a.eval(t).map_err(|e| SimError::Coeff(e.into()))?;
        Ok(z * (g - a * z))
    };

    let mut tr = Trajectory::with_capacity(n / cfg.record_stride + 2, Method::Rk4, cfg.seed);
    let mut z = cfg.x0;
    let mut running_max = z;
    tr.push(0.0, z, 0.0);
    for k in 0..n {
        let t = k as f64 * dt;
        let k1 = rhs(t, z)?;
        let k2 = rhs(t + 0.5 * dt, z + 0.5 * dt * k1)?;
        let k3 = rhs(t + 0.5 * dt, z + 0.5 * dt * k2)?;
        let k4 = rhs(t + dt, z + dt * k3)?;
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t_next = (k + 1) as f64 * dt;
        if !z.is_finite() || z.abs() > BLOW_UP {
            return Err(SimError::BlowUp { t: t_next });
        }
        running_max = running_max.max(z);
        if cfg.records(k + 1, n) {
            tr.push(t_next, z, 0.0);
        }
    }
    Ok(Rk4Run {
        trajectory: tr,
        running_max,
    })
}

/// Solution of the noise-free equation `dx/dt = x (r(t) - a(t) x)`.
///
/// `noise_integral` is identically zero.
pub fn solve_deterministic(spec: &SystemSpec, cfg: &SimConfig) -> Result<Trajectory, SimError> {
    Ok(rk4_logistic(spec.r(), spec.a(), cfg)?.trajectory)
}

/// Solution of the p-th moment comparison equation.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSolution {
    pub p: f64,
    pub trajectory: Trajectory,
    /// Largest `z` over every integration step, not just recorded ones.
    pub running_max: f64,
}

impl MomentSolution {
    /// `running_max^p`, the bound on `E[x^p(t)]` for large `t`.
    pub fn bound(&self) -> f64 {
        self.running_max.powf(self.p)
    }
}

/// Integrates
///
/// ```text
/// dz/dt = z ( r(t) + (p-1)σ²(t)/2 - a(t) z ),   z(0) = x0
/// ```
///
/// whose running maximum, raised to the p-th power, bounds the long-run
/// p-th moment of the stochastic solution started at the same point. At
/// `p = 1` this is the deterministic equation.
pub fn solve_moment_ode(spec: &SystemSpec, p: f64, cfg: &SimConfig) -> Result<MomentSolution, SimError> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(SimError::InvalidConfig(format!("moment order must be positive, got {p}")));
    }
    let run = rk4_logistic(&spec.moment_growth(p), spec.a(), cfg)?;
    Ok(MomentSolution {
        p,
        trajectory: run.trajectory,
        running_max: run.running_max,
    })
}
