//! Expression trees over the coordinates x1, x2, y1, y2 and named parameters.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Jet3;
use crate::Scalar;

pub use parse::{parse_expr, parse_web, ParseError, ParseErrorKind};

/// Value of the built-in constant `euler`.
pub const EULER: f64 = std::f64::consts::E;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X1,
    X2,
    Y1,
    Y2,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X1, Var::X2, Var::Y1, Var::Y2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["x1", "x2", "y1", "y2"][self.index()]
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Param(String),
    Neg(Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    /// Names of all parameters referenced by the tree.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Param(p) => {
                out.insert(p.clone());
            }
            Expr::Neg(a) | Expr::Exp(a) | Expr::Ln(a) | Expr::Pow(a, _) => a.collect_params(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => 1,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Ln(a) | Expr::Pow(a, _) => 1 + a.depth(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints in DSL syntax; parsing the output gives back the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "-{:?}", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Param(p) => f.write_str(p),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 3)
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Ln(a) => write!(f, "ln({a})"),
            Expr::Pow(a, k) => {
                write_child(f, a, 5)?;
                write!(f, "^{k}")
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, p) = match self {
                    Expr::Add(..) => (" + ", 1),
                    Expr::Sub(..) => (" - ", 1),
                    Expr::Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                write_child(f, a, p)?;
                f.write_str(op)?;
                write_child(f, b, p + 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of a non-positive value")]
    LnDomain,
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
}

/// Number system an expression can be evaluated in.
pub trait EvalField: Clone {
    fn constant(c: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn exp(&self) -> Self;
    fn div(&self, o: &Self) -> Result<Self, EvalError>;
    fn ln(&self) -> Result<Self, EvalError>;
    fn powi(&self, k: i32) -> Result<Self, EvalError>;
}

macro_rules! float_field {
    ($t:ty) => {
        impl EvalField for $t {
            fn constant(c: f64) -> Self {
                c as $t
            }
            fn add(&self, o: &Self) -> Self {
                self + o
            }
            fn sub(&self, o: &Self) -> Self {
                self - o
            }
            fn mul(&self, o: &Self) -> Self {
                self * o
            }
            fn neg(&self) -> Self {
                -self
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn div(&self, o: &Self) -> Result<Self, EvalError> {
                if *o == 0.0 {
                    Err(EvalError::DivisionByZero)
                } else {
                    Ok(self / o)
                }
            }
            fn ln(&self) -> Result<Self, EvalError> {
                if *self <= 0.0 {
                    Err(EvalError::LnDomain)
                } else {
                    Ok(<$t>::ln(*self))
                }
            }
            fn powi(&self, k: i32) -> Result<Self, EvalError> {
                if k < 0 && *self == 0.0 {
                    Err(EvalError::DivisionByZero)
                } else {
                    Ok(<$t>::powi(*self, k))
                }
            }
        }
    };
}

float_field!(f64);
float_field!(f32);

impl<T: Scalar> EvalField for Jet3<T> {
    fn constant(c: f64) -> Self {
        Jet3::constant(T::lit(c))
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn exp(&self) -> Self {
        Jet3::exp(self)
    }
    fn div(&self, o: &Self) -> Result<Self, EvalError> {
        if o.value() == T::zero() {
            Err(EvalError::DivisionByZero)
        } else {
            Ok(*self * o.recip())
        }
    }
    fn ln(&self) -> Result<Self, EvalError> {
        if self.value() <= T::zero() {
            Err(EvalError::LnDomain)
        } else {
            Ok(Jet3::ln(self))
        }
    }
    fn powi(&self, k: i32) -> Result<Self, EvalError> {
        if k < 0 && self.value() == T::zero() {
            Err(EvalError::DivisionByZero)
        } else {
            Ok(Jet3::powi(self, k))
        }
    }
}

pub type Bindings = BTreeMap<String, f64>;

/// Evaluates `e` with the four coordinates set to `vars`.
pub fn eval_in<F: EvalField>(e: &Expr, vars: &[F; 4], params: &Bindings) -> Result<F, EvalError> {
    Ok(match e {
        Expr::Const(c) => F::constant(*c),
        Expr::Var(v) => vars[v.index()].clone(),
        Expr::Param(p) => match params.get(p) {
            Some(v) => F::constant(*v),
            None => return Err(EvalError::UnboundParameter(p.clone())),
        },
        Expr::Neg(a) => eval_in(a, vars, params)?.neg(),
        Expr::Exp(a) => eval_in(a, vars, params)?.exp(),
        Expr::Ln(a) => eval_in(a, vars, params)?.ln()?,
        Expr::Pow(a, k) => eval_in(a, vars, params)?.powi(*k)?,
        Expr::Add(a, b) => eval_in(a, vars, params)?.add(&eval_in(b, vars, params)?),
        Expr::Sub(a, b) => eval_in(a, vars, params)?.sub(&eval_in(b, vars, params)?),
        Expr::Mul(a, b) => eval_in(a, vars, params)?.mul(&eval_in(b, vars, params)?),
        Expr::Div(a, b) => eval_in(a, vars, params)?.div(&eval_in(b, vars, params)?)?,
    })
}

pub fn eval_expr(e: &Expr, point: [f64; 4], params: &Bindings) -> Result<f64, EvalError> {
    eval_in(e, &point, params)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    NonZero,
    Positive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub expr: Expr,
    pub relation: Relation,
}

impl Constraint {
    /// Holds with `|v| >= margin` (non-zero) or `v >= margin` (positive).
    pub fn holds(&self, point: [f64; 4], params: &Bindings, margin: f64) -> bool {
        match eval_expr(&self.expr, point, params) {
            Ok(v) => match self.relation {
                Relation::NonZero => v.abs() >= margin && v != 0.0,
                Relation::Positive => v >= margin && v > 0.0,
            },
            Err(_) => false,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.relation {
            Relation::NonZero => write!(f, "{} != 0", self.expr),
            Relation::Positive => write!(f, "{} > 0", self.expr),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum WebError {
    #[error("parameter `{0}` is used but not declared")]
    Undeclared(String),
    #[error("unknown parameter `{0}`")]
    UnknownOverride(String),
}

/// A three-web given by `u1 = f1`, `u2 = f2` on the admissible domain cut out by the constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct WebDefinition {
    pub u1: Expr,
    pub u2: Expr,
    pub constraints: Vec<Constraint>,
    pub params: Bindings,
    pub label: String,
}

impl WebDefinition {
    pub fn new(
        u1: Expr,
        u2: Expr,
        constraints: Vec<Constraint>,
        params: Bindings,
        label: impl Into<String>,
    ) -> Result<Self, WebError> {
        let web = WebDefinition { u1, u2, constraints, params, label: label.into() };
        let mut used = web.u1.params();
        used.extend(web.u2.params());
        for c in &web.constraints {
            used.extend(c.expr.params());
        }
        if let Some(p) = used.into_iter().find(|p| !web.params.contains_key(p)) {
            return Err(WebError::Undeclared(p));
        }
        Ok(web)
    }

    /// Same web with some parameter values replaced.
    pub fn with_params(&self, overrides: &Bindings) -> Result<Self, WebError> {
        let mut web = self.clone();
        for (k, v) in overrides {
            match web.params.get_mut(k) {
                Some(slot) => *slot = *v,
                None => return Err(WebError::UnknownOverride(k.clone())),
            }
        }
        Ok(web)
    }

    pub fn functions(&self) -> [&Expr; 2] {
        [&self.u1, &self.u2]
    }

    /// Index of the first constraint violated at `point` with the given margin.
    pub fn first_violation(&self, point: [f64; 4], margin: f64) -> Option<usize> {
        self.constraints.iter().position(|c| !c.holds(point, &self.params, margin))
    }

    pub fn to_source(&self) -> String {
        let mut s = String::new();
        if !self.label.is_empty() {
            s.push_str(&format!("label {}\n", self.label));
        }
        for (k, v) in &self.params {
            s.push_str(&format!("param {k} = {v:?}\n"));
        }
        s.push_str(&format!("u1 = {}\nu2 = {}\n", self.u1, self.u2));
        for c in &self.constraints {
            s.push_str(&format!("domain {c}\n"));
        }
        s
    }
}

/// True iff every constraint holds at `point` with the given margin.
pub fn check_domain(web: &WebDefinition, point: [f64; 4], margin: f64) -> bool {
    web.first_violation(point, margin).is_none()
}
