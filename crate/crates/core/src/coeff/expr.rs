//! Expression trees for time-dependent coefficients.

use std::fmt;
use std::ops;

use thiserror::Error;

/// Functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Sqrt,
    Exp,
    Abs,
}

impl UnaryOp {
    /// Name used in the surface syntax, `None` for negation.
    pub fn function_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Sin => Some("sin"),
            UnaryOp::Cos => Some("cos"),
            UnaryOp::Sqrt => Some("sqrt"),
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Abs => Some("abs"),
        }
    }

    pub fn from_function_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "sqrt" => Some(UnaryOp::Sqrt),
            "exp" => Some(UnaryOp::Exp),
            "abs" => Some(UnaryOp::Abs),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// A node of a coefficient expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Time,
    Pi,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalErrorKind {
    #[error("square root of negative value {0}")]
    NegativeRadicand(f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite result")]
    NonFinite,
}

/// Evaluation failure together with the time at which it happened.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("{kind} at t={t}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub t: f64,
}

impl Expr {
    fn eval(&self, t: f64) -> Result<f64, EvalErrorKind> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Time => t,
            Expr::Pi => std::f64::consts::PI,
            Expr::Unary(op, child) => {
                let x = child.eval(t)?;
                match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalErrorKind::NegativeRadicand(x));
                        }
                        x.sqrt()
                    }
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Abs => x.abs(),
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let l = lhs.eval(t)?;
                let r = rhs.eval(t)?;
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div => {
                        if r == 0.0 {
                            return Err(EvalErrorKind::DivisionByZero);
                        }
                        l / r
                    }
                    BinaryOp::Pow => pow(l, r),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalErrorKind::NonFinite)
        }
    }

    /// Binding strength used by the printer; larger binds tighter.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Expr::Unary(UnaryOp::Neg, _) => 3,
            Expr::Binary(BinaryOp::Pow, ..) => 4,
            // a constant that would print with a sign is not an atom
            Expr::Const(c) if c.is_sign_negative() => 0,
            _ => 5,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn pow(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Time => f.write_str("t"),
            Expr::Pi => f.write_str("pi"),
            Expr::Unary(UnaryOp::Neg, child) => {
                f.write_str("-")?;
                child.write_child(f, child.precedence() < 3)
            }
            Expr::Unary(op, child) => {
                write!(f, "{}({child})", op.function_name().unwrap_or_default())
            }
            Expr::Binary(BinaryOp::Pow, base, exponent) => {
                base.write_child(f, base.precedence() < 5)?;
                f.write_str("^")?;
                exponent.write_child(f, exponent.precedence() < 3)
            }
            Expr::Binary(op, lhs, rhs) => {
                let prec = self.precedence();
                lhs.write_child(f, lhs.precedence() < prec)?;
                write!(f, " {} ", op.symbol())?;
                rhs.write_child(f, rhs.precedence() <= prec)
            }
        }
    }
}

/// A parsed coefficient function of time, such as `r(t)`, `a(t)` or `σ(t)`.
///
/// Immutable once built. `Display` prints a canonical form that parses back
/// to the same tree.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffExpr {
    root: Expr,
}

impl CoeffExpr {
    pub fn new(root: Expr) -> Self {
        Self { root }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(Expr::Const(value))
    }

    pub fn time() -> Self {
        Self::new(Expr::Time)
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    /// Value at time `t`. Never returns NaN or an infinity.
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        self.root.eval(t).map_err(|kind| EvalError { kind, t })
    }

    pub fn unary(op: UnaryOp, child: CoeffExpr) -> Self {
        Self::new(Expr::Unary(op, Box::new(child.root)))
    }

    pub fn binary(op: BinaryOp, lhs: CoeffExpr, rhs: CoeffExpr) -> Self {
        Self::new(Expr::Binary(op, Box::new(lhs.root), Box::new(rhs.root)))
    }

    pub fn pow(self, exponent: f64) -> Self {
        Self::binary(BinaryOp::Pow, self, Self::constant(exponent))
    }

    /// True when the expression does not depend on `t`.
    pub fn is_constant(&self) -> bool {
        fn walk(e: &Expr) -> bool {
            match e {
                Expr::Time => false,
                Expr::Const(_) | Expr::Pi => true,
                Expr::Unary(_, c) => walk(c),
                Expr::Binary(_, l, r) => walk(l) && walk(r),
            }
        }
        walk(&self.root)
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

macro_rules! binary_operator {
    ($trait:ident, $method:ident, $op:expr) => {
        impl ops::$trait for CoeffExpr {
            type Output = CoeffExpr;
            fn $method(self, rhs: CoeffExpr) -> CoeffExpr {
                CoeffExpr::binary($op, self, rhs)
            }
        }

        impl ops::$trait<f64> for CoeffExpr {
            type Output = CoeffExpr;
            fn $method(self, rhs: f64) -> CoeffExpr {
                CoeffExpr::binary($op, self, CoeffExpr::constant(rhs))
            }
        }
    };
}

binary_operator!(Add, add, BinaryOp::Add);
binary_operator!(Sub, sub, BinaryOp::Sub);
binary_operator!(Mul, mul, BinaryOp::Mul);
binary_operator!(Div, div, BinaryOp::Div);

impl ops::Neg for CoeffExpr {
    type Output = CoeffExpr;
    fn neg(self) -> CoeffExpr {
        CoeffExpr::unary(UnaryOp::Neg, self)
    }
}
