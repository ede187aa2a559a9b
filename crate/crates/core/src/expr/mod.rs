//! Symbolic expressions over fractal jet coordinates.
//!
//! The independent variable enters only through the staircase atom `S(x)`,
//! with `D S(x) = 1` on the set. `S(y)` is a formal atom with
//! `∂S(y)/∂y = 1`. Jet variables `y^(kα)` are independent coordinates.

mod ast;
mod diff;
mod eval;
mod normal;
mod parse;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use ast::{Expr, Func};
pub use diff::{partial, partial_poly, total_derivative, total_derivative_poly, Var};
pub(crate) use eval::probe_points_for;
pub use eval::{is_zero, probe_norm, JetPoint, PROBE_POINTS, PROBE_SEED};
pub use normal::{Factor, Monomial, Poly};
pub use parse::{parse, parse_with, Parser};

/// A leaf of the jet-space algebra.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Atom {
    /// `S(x)`, the staircase of the independent variable.
    Sx,
    /// `S(y)`.
    Sy,
    /// `y`, jet order 0.
    Y,
    /// `y^(kα)` for `k ≥ 1`.
    Jet(u32),
    /// Staircase coordinate `S(x_i)` of a multi-coordinate patch.
    Coord(u32),
    /// Free constant such as `c1`.
    Param(Arc<str>),
    /// `k`-th staircase derivative of an unknown function of `x`.
    Unknown(Arc<str>, u32),
}

impl Atom {
    pub fn param(name: &str) -> Self {
        Atom::Param(Arc::from(name))
    }

    pub fn unknown(name: &str) -> Self {
        Atom::Unknown(Arc::from(name), 0)
    }

    /// Jet order contributed by this atom (`y` is 0, `y^(kα)` is `k`).
    pub fn jet_order(&self) -> Option<u32> {
        match self {
            Atom::Y => Some(0),
            Atom::Jet(k) => Some(*k),
            _ => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Sx => f.write_str("S(x)"),
            Atom::Sy => f.write_str("S(y)"),
            Atom::Y => f.write_str("y"),
            Atom::Jet(k) => f.write_str(&jet_name(*k)),
            Atom::Coord(i) => write!(f, "S(x{i})"),
            Atom::Param(name) => f.write_str(name),
            Atom::Unknown(name, 0) => f.write_str(name),
            Atom::Unknown(name, k) => write!(f, "D[{name},{k}]"),
        }
    }
}

/// Display name of the `k`-th jet coordinate: `y`, `y^(α)`, `y^(2α)`, …
pub fn jet_name(k: u32) -> String {
    match k {
        0 => "y".to_string(),
        1 => "y^(α)".to_string(),
        k => format!("y^({k}α)"),
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: found {found}, expected {}", expected.join(" or "))]
    Syntax {
        pos: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("unknown symbol `{name}` at byte {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("no value bound for {0}")]
    UnboundAtom(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("jet order {order} reaches the limit {max_order}")]
    OrderOverflow { order: u32, max_order: u32 },
}
