//! Exact, frame-level computations with Lie algebroids over polynomial charts.
//!
//! Everything is computed over ℚ. An algebroid is presented by a local frame:
//! an anchor matrix and structure functions, both polynomial. Pullbacks,
//! descent, LA-groupoids, Čech double complexes and Poisson structures are
//! all built on that presentation and verified by exact identities.

pub mod algebroid;
pub mod exactalg;
pub mod groupoid;
pub mod poisson;
pub mod pullback;
pub mod samples;
pub mod stackcoh;

mod verdict;

pub use algebroid::{AlgebroidPresentation, ChartBase, Form, MorphismData, Representation};
pub use exactalg::{
    parse_rational, rat, DoubleComplex, GradedComplex, Poly, PolyMatrix, RatMatrix, Rational,
};
pub use groupoid::{DeskGroupoid, FiniteGroup, GroupoidAlgebroid, LAGroupoid};
pub use poisson::{PoissonStructure, PolyVectorField};
pub use pullback::{PullbackAlgebroid, SplitSubmersion};
pub use verdict::{Verdict, Witness};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a cochain complex: d∘d ≠ 0 at grade {grade}, degree {degree}")]
    NotACocomplex { grade: i64, degree: usize },
    #[error("differentials do not commute at ({row}, {col})")]
    NotCommuting { row: usize, col: usize },
    #[error("top degree {0}: no forms of higher degree exist")]
    TopDegree(usize),
    #[error("structure functions are not antisymmetric: {0}")]
    Antisymmetry(String),
    #[error("grading not preserved: {0}")]
    Grading(String),
    #[error("supplied inverse is wrong: {0}")]
    BadInverse(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("outside the supported model: {0}")]
    Unsupported(String),
    #[error("invalid datum: {0}")]
    Invalid(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
