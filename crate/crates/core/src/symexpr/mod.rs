//! Symbolic scalar expressions: parsing, canonical construction,
//! differentiation, simplification and floating-point evaluation.

mod diff;
mod eval;
mod expr;
mod parse;
mod print;
mod simplify;
mod zero;

pub use diff::{differentiate, Differentiator};
pub use eval::{evaluate, Binding, EvalError, Tape};
pub use expr::{canonical_cmp, Expr, Func, Kind, Rational};
pub use parse::{parse, ParseError};
pub use simplify::{simplify, simplify_with, SimplifyOptions};
pub use zero::{is_zero, is_zero_with, ZeroStatus, ZeroTest};
