//! One-variable closed-form expressions with exact derivatives.
//!
//! Model functions (the transport velocity, the viscosity coefficients and
//! the initial profile) are supplied as text such as `1/(1+x^2)`. They are
//! parsed into an [`Expression`] and evaluated either as plain `f64` or as a
//! [`Jet`] carrying derivatives up to fourth order.

mod jet;
mod parse;

use std::fmt;

use thiserror::Error;

pub use jet::{Jet, MAX_ORDER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at offset {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("exponent at offset {offset} must be a non-negative integer literal")]
    BadExponent { offset: usize },
    #[error("domain error in '{subexpr}': {reason}")]
    Domain { subexpr: String, reason: String },
    #[error("jet order {0} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooHigh(usize),
}

impl ExprError {
    /// Byte offset into the source, for parse errors.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ExprError::Syntax { offset, .. }
            | ExprError::UnknownIdentifier { offset, .. }
            | ExprError::BadExponent { offset } => Some(*offset),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Atan,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "atan" => Func::Atan,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
    Call(Func, Box<Node>),
}

// Precedence levels used by the printer; they mirror the grammar.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const PRIMARY: u8 = 5;

impl Node {
    fn level(&self) -> u8 {
        match self {
            Node::Add(..) | Node::Sub(..) => SUM,
            Node::Mul(..) | Node::Div(..) => PRODUCT,
            Node::Neg(_) => UNARY,
            Node::Pow(..) => POWER,
            Node::Const(c) if *c < 0.0 => UNARY,
            Node::Const(_) | Node::Var | Node::Call(..) => PRIMARY,
        }
    }

    fn write(&self, var: &str, min_level: u8, out: &mut String) {
        let paren = self.level() < min_level;
        if paren {
            out.push('(');
        }
        match self {
            Node::Const(c) => out.push_str(&format!("{c:?}")),
            Node::Var => out.push_str(var),
            Node::Neg(x) => {
                out.push('-');
                x.write(var, UNARY, out);
            }
            Node::Add(l, r) | Node::Sub(l, r) => {
                l.write(var, SUM, out);
                out.push_str(if matches!(self, Node::Add(..)) { " + " } else { " - " });
                r.write(var, PRODUCT, out);
            }
            Node::Mul(l, r) | Node::Div(l, r) => {
                l.write(var, PRODUCT, out);
                out.push_str(if matches!(self, Node::Mul(..)) { "*" } else { "/" });
                r.write(var, UNARY, out);
            }
            Node::Pow(b, n) => {
                b.write(var, POWER, out);
                out.push_str(&format!("^{n}"));
            }
            Node::Call(f, arg) => {
                out.push_str(f.name());
                out.push('(');
                arg.write(var, SUM, out);
                out.push(')');
            }
        }
        if paren {
            out.push(')');
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match self {
            Node::Const(c) => *c,
            Node::Var => x,
            Node::Neg(a) => -a.eval(x),
            Node::Add(a, b) => a.eval(x) + b.eval(x),
            Node::Sub(a, b) => a.eval(x) - b.eval(x),
            Node::Mul(a, b) => a.eval(x) * b.eval(x),
            Node::Div(a, b) => a.eval(x) / b.eval(x),
            Node::Pow(a, n) => a.eval(x).powi(*n as i32),
            Node::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                    Func::Atan => v.atan(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    fn eval_jet(&self, var: &str, x: &Jet) -> Result<Jet, ExprError> {
        let order = x.order();
        let domain = |node: &Node, reason: &str| ExprError::Domain {
            subexpr: node.to_source(var),
            reason: reason.into(),
        };
        Ok(match self {
            Node::Const(c) => Jet::constant(*c, order),
            Node::Var => *x,
            Node::Neg(a) => -a.eval_jet(var, x)?,
            Node::Add(a, b) => a.eval_jet(var, x)? + b.eval_jet(var, x)?,
            Node::Sub(a, b) => a.eval_jet(var, x)? - b.eval_jet(var, x)?,
            Node::Mul(a, b) => a.eval_jet(var, x)? * b.eval_jet(var, x)?,
            Node::Div(a, b) => {
                let num = a.eval_jet(var, x)?;
                let den = b.eval_jet(var, x)?;
                num.checked_div(&den)
                    .ok_or_else(|| domain(b, "division by zero"))?
            }
            Node::Pow(a, n) => a.eval_jet(var, x)?.powi(*n),
            Node::Call(f, a) => {
                let arg = a.eval_jet(var, x)?;
                match f {
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Exp => arg.exp(),
                    Func::Atan => arg.atan(),
                    Func::Log => arg
                        .ln()
                        .ok_or_else(|| domain(self, "logarithm of a non-positive value"))?,
                    Func::Sqrt => arg.sqrt().ok_or_else(|| {
                        domain(self, "square root outside its differentiable domain")
                    })?,
                }
            }
        })
    }

    fn to_source(&self, var: &str) -> String {
        let mut s = String::new();
        self.write(var, SUM, &mut s);
        s
    }
}

/// A parsed one-variable expression.
///
/// Equality compares the tree structure only, not the variable name.
#[derive(Debug, Clone)]
pub struct Expression {
    root: Node,
    var: String,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Expression {
    /// Parses `source`; the first identifier that is neither a function
    /// nor `pi` becomes the free variable.
    pub fn parse(source: &str) -> Result<Self, ExprError> {
        Self::parse_impl(source, None)
    }

    /// Parses `source`, accepting `var` as the only free variable.
    pub fn parse_in(source: &str, var: &str) -> Result<Self, ExprError> {
        Self::parse_impl(source, Some(var))
    }

    fn parse_impl(source: &str, var: Option<&str>) -> Result<Self, ExprError> {
        let mut parser = parse::Parser::new(source, var)?;
        let root = parser.parse_all()?;
        let var = parser.var.unwrap_or_else(|| "x".to_string());
        Ok(Expression { root, var })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// Plain evaluation. Domain violations surface as NaN or infinity.
    pub fn eval(&self, x: f64) -> f64 {
        self.root.eval(x)
    }

    /// Evaluation with domain checking.
    pub fn try_eval(&self, x: f64) -> Result<f64, ExprError> {
        self.eval_jet(x, 0).map(|j| j.value())
    }

    /// Value and derivatives up to `order` at `point`.
    pub fn eval_jet(&self, point: f64, order: usize) -> Result<Jet, ExprError> {
        if order > MAX_ORDER {
            return Err(ExprError::OrderTooHigh(order));
        }
        self.compose_jet(&Jet::variable(point, order))
    }

    /// Evaluates the expression on a jet argument, which composes the two
    /// functions.
    pub fn compose_jet(&self, inner: &Jet) -> Result<Jet, ExprError> {
        self.root.eval_jet(&self.var, inner)
    }

    /// True when the tree contains no occurrence of the variable.
    pub fn is_constant(&self) -> bool {
        fn has_var(n: &Node) -> bool {
            match n {
                Node::Const(_) => false,
                Node::Var => true,
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => has_var(a),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    has_var(a) || has_var(b)
                }
            }
        }
        !has_var(&self.root)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root.to_source(&self.var))
    }
}

impl std::str::FromStr for Expression {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expression::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn evaluates_rational_function() {
        let e = Expression::parse("1/(1+x^2)").unwrap();
        assert_relative_eq!(e.eval(2.0), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn unclosed_parenthesis_reports_offset() {
        let err = Expression::parse("sin(x").unwrap_err();
        assert_eq!(err.offset(), Some(5));
        assert!(err.to_string().contains("unclosed parenthesis"), "{err}");
    }

    #[test]
    fn binary_minus_then_unary_minus() {
        let e = Expression::parse("u*u - -u").unwrap();
        assert_eq!(e.eval(3.0), 12.0);
        assert_eq!(
            e.root(),
            &Node::Sub(
                Box::new(Node::Mul(Box::new(Node::Var), Box::new(Node::Var))),
                Box::new(Node::Neg(Box::new(Node::Var)))
            )
        );
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = Expression::parse("-x^2").unwrap();
        assert_eq!(e.eval(3.0), -9.0);
        let e = Expression::parse("(-x)^2").unwrap();
        assert_eq!(e.eval(3.0), 9.0);
    }

    #[test]
    fn left_associative_subtraction_and_division() {
        assert_eq!(Expression::parse("10 - 4 - 3").unwrap().eval(0.0), 3.0);
        assert_eq!(Expression::parse("24/4/3").unwrap().eval(0.0), 2.0);
    }

    #[test]
    fn rejects_bad_exponents() {
        for src in ["x^-1", "x^1.5", "x^y", "x^"] {
            let err = Expression::parse(src).unwrap_err();
            assert!(matches!(err, ExprError::BadExponent { .. }), "{src}: {err}");
        }
    }

    #[test]
    fn rejects_second_variable() {
        let err = Expression::parse("x + y").unwrap_err();
        assert_eq!(
            err,
            ExprError::UnknownIdentifier {
                name: "y".into(),
                offset: 4
            }
        );
        let err = Expression::parse_in("x", "u").unwrap_err();
        assert!(matches!(err, ExprError::UnknownIdentifier { .. }));
    }

    #[test]
    fn trailing_garbage_and_empty() {
        assert_eq!(Expression::parse("   ").unwrap_err(), ExprError::Empty);
        assert!(matches!(
            Expression::parse("x x").unwrap_err(),
            ExprError::Syntax { offset: 2, .. }
        ));
        assert!(matches!(
            Expression::parse("x + * 2").unwrap_err(),
            ExprError::Syntax { offset: 4, .. }
        ));
        assert!(matches!(
            Expression::parse("sin x").unwrap_err(),
            ExprError::Syntax { offset: 4, .. }
        ));
    }

    #[test]
    fn sine_jet() {
        let j = Expression::parse("sin(x)").unwrap().eval_jet(0.0, 4).unwrap();
        assert_eq!(j.derivatives(), vec![0.0, 1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn identity_jet() {
        let j = Expression::parse("x").unwrap().eval_jet(7.0, 2).unwrap();
        assert_eq!(j.derivatives(), vec![7.0, 1.0, 0.0]);
    }

    #[test]
    fn initial_profile_jet_at_inflection() {
        // F = 1/(1+x^2) at x = 1/sqrt(3), derivatives by hand:
        // F = 3/4, F' = -2x/(1+x^2)^2 = -3 sqrt3/8, F'' = 0, F''' = 27 sqrt3/16.
        let s3 = 3f64.sqrt();
        let j = Expression::parse("1/(1+x^2)")
            .unwrap()
            .eval_jet(1.0 / s3, 3)
            .unwrap();
        assert_relative_eq!(j.derivative(0), 0.75, epsilon = 1e-14);
        assert_relative_eq!(j.derivative(1), -3.0 * s3 / 8.0, epsilon = 1e-14);
        assert!(j.derivative(2).abs() < 1e-14);
        assert_relative_eq!(j.derivative(3), 27.0 * s3 / 16.0, epsilon = 1e-13);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = Expression::parse("1 + log(x - 2)").unwrap();
        match e.eval_jet(1.0, 1).unwrap_err() {
            ExprError::Domain { subexpr, .. } => assert_eq!(subexpr, "log(x - 2.0)"),
            other => panic!("unexpected {other}"),
        }
        let e = Expression::parse("1/(x-1)").unwrap();
        match e.try_eval(1.0).unwrap_err() {
            ExprError::Domain { subexpr, .. } => assert_eq!(subexpr, "x - 1.0"),
            other => panic!("unexpected {other}"),
        }
        assert!(Expression::parse("sqrt(x)").unwrap().eval_jet(-1.0, 0).is_err());
        assert!(matches!(
            Expression::parse("x").unwrap().eval_jet(0.0, 5),
            Err(ExprError::OrderTooHigh(5))
        ));
    }

    #[test]
    fn pi_and_scientific_literals() {
        let e = Expression::parse("pi*2.5e-1 + 1E1").unwrap();
        assert_relative_eq!(e.eval(0.0), std::f64::consts::PI / 4.0 + 10.0);
    }

    #[test]
    fn printing_roundtrip_examples() {
        for src in [
            "u*u - -u",
            "-x^2",
            "(-x)^2",
            "x^2^3",
            "x - (1 - x)",
            "x/(x*x)",
            "-(x + 1)",
            "--x",
            "exp(-x)*sin(2*x) / (1 + atan(x)^3)",
        ] {
            let e = Expression::parse(src).unwrap();
            let again = Expression::parse(&e.to_string()).unwrap();
            assert_eq!(e, again, "{src} -> {e}");
        }
    }
}
