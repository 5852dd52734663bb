//! Simulation and numerical verification toolkit for the non-autonomous
//! stochastic logistic equation
//!
//! ```text
//! dx(t) = x(t) [ (r(t) - a(t) x(t)) dt + σ(t) dB(t) ]
//! ```
//!
//! - [`coeff`]: coefficient expressions, Simpson quadrature, system specs.
//! - [`hypotheses`]: sliding-window and long-run-average criteria and the
//!   permanence / extinction classification they imply.
//! - [`sde`]: Euler–Maruyama paths, deterministic and moment-comparison
//!   RK4 solutions.
//! - [`montecarlo`]: ensembles, tail probabilities, moment bounds,
//!   coupled-pair attractivity and the strong law for the noise integral.
//! - [`cli`]: config files, the four built-in systems and the
//!   `logistic-sde` command line.

pub mod cli;
pub mod coeff;
pub mod hypotheses;
pub mod montecarlo;
pub mod sde;

pub use cli::builtin_example;
pub use coeff::{parse_expr, CoeffExpr, SystemSpec};
