use std::fmt;

use super::expr::CoeffExpr;
use super::quadrature::TimeGrid;
use super::CoeffError;

/// Which coefficient of `dx = x[(r - a x) dt + σ dB]` a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficient {
    R,
    A,
    Sigma,
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coefficient::R => "r",
            Coefficient::A => "a",
            Coefficient::Sigma => "sigma",
        })
    }
}

/// Coefficients `r(t)`, `a(t)`, `σ(t)` of the stochastic logistic equation.
///
/// Construction checks, on the validation grid, that all three evaluate to
/// finite values and that `a` and `σ` are nonnegative. Boundedness and
/// continuity on the whole half-line are not (and cannot be) verified: an
/// unbounded coefficient such as `t` passes.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    r: CoeffExpr,
    a: CoeffExpr,
    sigma: CoeffExpr,
    validation_grid: TimeGrid,
    label: String,
}

impl SystemSpec {
    pub const DEFAULT_VALIDATION_GRID: TimeGrid = TimeGrid {
        start: 0.0,
        end: 500.0,
        step: 0.01,
    };

    pub fn new(
        r: CoeffExpr,
        a: CoeffExpr,
        sigma: CoeffExpr,
        validation_grid: TimeGrid,
        label: impl Into<String>,
    ) -> Result<Self, CoeffError> {
        validation_grid.validate()?;
        let spec = Self {
            r,
            a,
            sigma,
            validation_grid,
            label: label.into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec from the three expressions, validated on the default grid.
    pub fn from_exprs(
        r: CoeffExpr,
        a: CoeffExpr,
        sigma: CoeffExpr,
        label: impl Into<String>,
    ) -> Result<Self, CoeffError> {
        Self::new(r, a, sigma, Self::DEFAULT_VALIDATION_GRID, label)
    }

    /// Parses and validates the three coefficient strings.
    pub fn parse(r: &str, a: &str, sigma: &str, label: impl Into<String>) -> Result<Self, CoeffError> {
        let parse = |which, text: &str| {
            text.parse::<CoeffExpr>()
                .map_err(|source| CoeffError::Parse { which, source })
        };
        Self::from_exprs(
            parse(Coefficient::R, r)?,
            parse(Coefficient::A, a)?,
            parse(Coefficient::Sigma, sigma)?,
            label,
        )
    }

    /// Constant coefficients.
    pub fn constant(r: f64, a: f64, sigma: f64) -> Result<Self, CoeffError> {
        Self::from_exprs(
            CoeffExpr::constant(r),
            CoeffExpr::constant(a),
            CoeffExpr::constant(sigma),
            format!("constant r={r} a={a} sigma={sigma}"),
        )
    }

    fn validate(&self) -> Result<(), CoeffError> {
        for t in self.validation_grid.points() {
            for (which, expr) in [
                (Coefficient::R, &self.r),
                (Coefficient::A, &self.a),
                (Coefficient::Sigma, &self.sigma),
            ] {
                let value = expr
                    .eval(t)
                    .map_err(|source| CoeffError::Evaluation { which, source })?;
                if which != Coefficient::R && value < 0.0 {
                    return Err(CoeffError::Negative { which, t, value });
                }
            }
        }
        Ok(())
    }

    pub fn r(&self) -> &CoeffExpr {
        &self.r
    }

    pub fn a(&self) -> &CoeffExpr {
        &self.a
    }

    pub fn sigma(&self) -> &CoeffExpr {
        &self.sigma
    }

    pub fn coefficient(&self, which: Coefficient) -> &CoeffExpr {
        match which {
            Coefficient::R => &self.r,
            Coefficient::A => &self.a,
            Coefficient::Sigma => &self.sigma,
        }
    }

    pub fn validation_grid(&self) -> TimeGrid {
        self.validation_grid
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The integrand `r(t) - σ(t)²/2` that governs growth of `ln x`.
    pub fn growth_margin(&self) -> CoeffExpr {
        self.r.clone() - self.sigma.clone().pow(2.0) / 2.0
    }

    /// Drift rate `r(t) + (p-1)σ(t)²/2` of the comparison equation for the
    /// p-th moment.
    pub fn moment_growth(&self, p: f64) -> CoeffExpr {
        self.r.clone() + self.sigma.clone().pow(2.0) * (0.5 * (p - 1.0))
    }
}
