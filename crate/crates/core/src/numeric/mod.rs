//! Numerical building blocks shared by the geometry and energy code.

pub mod quadrature;
pub mod sampling;
