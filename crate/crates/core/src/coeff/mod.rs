//! Time-dependent coefficient functions: parsing, evaluation, quadrature.

mod expr;
mod parser;
mod quadrature;
mod system;

use thiserror::Error;

pub use expr::{BinaryOp, CoeffExpr, EvalError, EvalErrorKind, Expr, UnaryOp};
pub use parser::{parse_expr, ParseError, ParseErrorKind};
pub use quadrature::{
    long_run_average, sliding_window_integrals, sup_abs_on_grid, window_integral, QuadratureParams,
    TimeGrid,
};
pub use system::{Coefficient, SystemSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{which}: {source}")]
    Parse { which: Coefficient, source: ParseError },
    #[error("{which}(t): {source}")]
    Evaluation { which: Coefficient, source: EvalError },
    #[error("{which}(t) negative at t={t} (value {value})")]
    Negative { which: Coefficient, t: f64, value: f64 },
    #[error("{0}")]
    InvalidParameter(String),
}
