//! Recursive-descent parser for coefficient expressions.
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := unary (("*"|"/") unary)* ;
//! unary  := "-" unary | power ;
//! power  := atom ("^" unary)? ;
//! atom   := NUMBER | "t" | "pi" | FUNC "(" expr ")" | "(" expr ")" ;
//! FUNC   := "sin" | "cos" | "sqrt" | "exp" | "abs" ;
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-t^2`
//! is `-(t^2)` and `2^3^2` is `2^(3^2)`. Positions in errors are byte
//! offsets into the input.

use thiserror::Error;

use super::expr::{BinaryOp, CoeffExpr, Expr, UnaryOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("invalid number literal '{0}'")]
    InvalidNumber(String),
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("function '{name}' takes {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(name) => format!("identifier '{name}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::Comma => "','".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            b',' => Some(Token::Comma),
            _ => None,
        };
        if let Some(tok) = simple {
            tokens.push((tok, start));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                } else {
                    return Err(ParseError {
                        kind: ParseErrorKind::InvalidNumber(text[start..j].to_string()),
                        position: start,
                    });
                }
            }
            let literal = &text[start..i];
            let value: f64 = literal.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::InvalidNumber(literal.to_string()),
                position: start,
            })?;
            if !value.is_finite() {
                return Err(ParseError {
                    kind: ParseErrorKind::InvalidNumber(literal.to_string()),
                    position: start,
                });
            }
            tokens.push((Token::Number(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push((Token::Ident(text[start..i].to_string()), start));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ParseError {
                kind: ParseErrorKind::UnexpectedChar(ch),
                position: start,
            });
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self) -> ParseError {
        let kind = match self.peek() {
            Some(tok) => ParseErrorKind::UnexpectedToken(tok.describe()),
            None => ParseErrorKind::UnexpectedEnd,
        };
        ParseError {
            kind,
            position: self.offset(),
        }
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinaryOp::Add,
                Some(Token::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinaryOp::Mul,
                Some(Token::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let child = self.unary()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(child)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.offset();
        match self.peek().cloned() {
            Some(Token::Number(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "t" => Ok(Expr::Time),
                    "pi" => Ok(Expr::Pi),
                    _ => match UnaryOp::from_function_name(&name) {
                        Some(op) => self.call(op, name, start),
                        None => Err(ParseError {
                            kind: ParseErrorKind::UnknownIdentifier(name),
                            position: start,
                        }),
                    },
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn call(&mut self, op: UnaryOp, name: String, start: usize) -> Result<Expr, ParseError> {
        if self.peek() != Some(&Token::LParen) {
            return Err(ParseError {
                kind: ParseErrorKind::Arity {
                    name,
                    expected: 1,
                    found: 0,
                },
                position: start,
            });
        }
        self.pos += 1;
        let mut args = Vec::new();
        if self.peek() != Some(&Token::RParen) {
            args.push(self.expr()?);
            while self.peek() == Some(&Token::Comma) {
                self.pos += 1;
                args.push(self.expr()?);
            }
        }
        self.expect(Token::RParen)?;
        if args.len() != 1 {
            return Err(ParseError {
                kind: ParseErrorKind::Arity {
                    name,
                    expected: 1,
                    found: args.len(),
                },
                position: start,
            });
        }
        let arg = args.pop().expect("one argument");
        Ok(Expr::Unary(op, Box::new(arg)))
    }
}

/// Parses the textual form of a coefficient function of `t`.
pub fn parse_expr(text: &str) -> Result<CoeffExpr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            position: 0,
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let root = parser.expr()?;
    if parser.bump().is_some() {
        parser.pos -= 1;
        return Err(parser.unexpected());
    }
    Ok(CoeffExpr::new(root))
}

impl std::str::FromStr for CoeffExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}
