//! Exact arithmetic in the field of rational functions over the chart
//! coordinates, plus partial derivatives and rational-point evaluation.

mod poly;
mod scalar;

pub use poly::{var_name, Monomial, Poly};
pub use scalar::Scalar;
