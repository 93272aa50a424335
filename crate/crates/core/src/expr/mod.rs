//! Univariate real expressions: parsing, serialization and derivative jets.
//!
//! The grammar is deliberately small. There is one variable, `x`, and the
//! elementary functions `exp`, `ln`, `sin`, `cos` and `sqrt`. Exponents of `^`
//! must be constant. `abs` is not available because every expression has to
//! stay differentiable as many times as a jet asks for.

mod jet;
mod parse;

use std::fmt;

pub use jet::{eval_jet, Jet, MAX_JET_ORDER};
pub use parse::{parse, MAX_DEPTH};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl UnaryOp {
    pub(crate) fn from_name(name: &str) -> Option<Self> {
        match name {
            "exp" => Some(UnaryOp::Exp),
            "ln" => Some(UnaryOp::Ln),
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }
}

/// Constant exponent of a power node.
///
/// Integral exponents are kept apart because they are evaluated by repeated
/// multiplication, which is valid for a base of any sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Int(i64),
    Real(f64),
}

impl Exponent {
    pub(crate) fn from_value(value: f64) -> Self {
        if value.fract() == 0.0 && value.abs() <= i32::MAX as f64 {
            Exponent::Int(value as i64)
        } else {
            Exponent::Real(value)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Int(k) => k as f64,
            Exponent::Real(r) => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, Exponent),
}

impl Node {
    pub fn sum(l: Node, r: Node) -> Node {
        Node::Binary(BinaryOp::Add, Box::new(l), Box::new(r))
    }

    pub fn quotient(l: Node, r: Node) -> Node {
        Node::Binary(BinaryOp::Div, Box::new(l), Box::new(r))
    }

    pub fn pow(base: Node, exponent: f64) -> Node {
        Node::Pow(Box::new(base), Exponent::from_value(exponent))
    }

    fn contains_var(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Unary(_, a) | Node::Pow(a, _) => a.contains_var(),
            Node::Binary(_, l, r) => l.contains_var() || r.contains_var(),
        }
    }
}

impl fmt::Display for Node {
    /// Fully parenthesized form. Constants use the shortest representation that
    /// reads back to the same `f64`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{:?})", -c)
            }
            Node::Const(c) => write!(f, "{c:?}"),
            Node::Var => f.write_str("x"),
            Node::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Node::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Node::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Node::Pow(base, Exponent::Int(k)) if *k < 0 => write!(f, "({base}^(-{}))", -k),
            Node::Pow(base, Exponent::Int(k)) => write!(f, "({base}^{k})"),
            Node::Pow(base, Exponent::Real(r)) if *r < 0.0 => write!(f, "({base}^(-{:?}))", -r),
            Node::Pow(base, Exponent::Real(r)) => write!(f, "({base}^{r:?})"),
        }
    }
}

/// A parsed function of `x`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
}

impl Expression {
    pub fn new(root: Node) -> Self {
        Expression { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Value of the expression at `x` (a jet of order zero).
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        Ok(eval_jet(self, x, 0)?.value())
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl std::str::FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("numeric literal at byte {offset} is not a finite number")]
    NonFiniteLiteral { offset: usize },
    #[error("exponent at byte {offset} must be a finite constant")]
    NonConstantExponent { offset: usize },
    #[error("expression nests deeper than {MAX_DEPTH} levels")]
    TooDeep,
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty | ParseError::TooDeep => None,
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::NonFiniteLiteral { offset }
            | ParseError::NonConstantExponent { offset } => Some(*offset),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    LnNonPositive,
    SqrtNonPositive,
    DivisionByZero,
    FractionalPowerNonPositive,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::LnNonPositive => "ln of a non-positive argument",
            DomainKind::SqrtNonPositive => "sqrt of a non-positive argument",
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::FractionalPowerNonPositive => "fractional power of a non-positive base",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("{kind} at x = {x}")]
    Domain { kind: DomainKind, x: f64 },
    #[error("derivative of order {order} at x = {x} is not finite")]
    NonFinite { order: usize, x: f64 },
    #[error("jet order {order} exceeds the cap of {max}")]
    OrderTooHigh { order: usize, max: usize },
}
