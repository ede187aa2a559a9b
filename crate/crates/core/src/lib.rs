//! Fractal calculus on Cantor-like sets and Lie symmetries of fractal ODEs.
// negated comparisons are how NaN parameters get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod cantor;
pub mod expr;
pub mod forms;
pub mod io;
pub mod symmetry;

pub use calculus::{CalculusError, FractalFn, Trajectory};
pub use cantor::{CantorError, FractalSet, Interval, Normalization, Staircase};
pub use expr::{Atom, Expr, ExprError, Poly, Var};
pub use forms::{Form, FormError, VectorField};
pub use symmetry::{FractalOde, Generator, Lagrangian, SymmetryError};
