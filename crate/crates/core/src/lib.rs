// Tensor code indexes several arrays by the same abstract index; `!(x > 0.0)`
// rejects NaN along with non-positive values.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod energetics;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod reduction;
pub mod symexpr;

pub use error::{Error, Result};
