//! Exact ℚ arithmetic: sparse polynomials, rational matrices and cochain complexes.

mod complex;
mod matrix;
mod poly;
mod rational;

pub use complex::{DoubleComplex, Grade, GradedComplex, TotalBetti};
pub use matrix::{PivotKernel, PolyMatrix, RatMatrix};
pub use poly::Poly;
pub use rational::{int, parse_rational, rat, Rational};
