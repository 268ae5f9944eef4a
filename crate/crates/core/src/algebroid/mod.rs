//! Lie algebroids over polynomial charts, presented by a frame.

mod cohomology;
mod forms;
mod morphism;
mod presentation;
mod representation;

pub use cohomology::{algebroid_cohomology, graded_complex, Grading};
pub use forms::{de_rham_d, Form};
pub use morphism::{check_morphism, Decomposition, MorphismData};
pub(crate) use cohomology::{basis_form, coordinates_in, graded_basis, monomials_of_weight};
pub(crate) use forms::sort_sign;
pub(crate) use morphism::pull;
pub use presentation::{
    apply_vector, lie_bracket, rank1_from_anchor, trivial_transitive, verify_algebroid, AlgebroidPresentation,
    ChartBase,
};
pub use representation::{verify_representation, Representation, TwistedForm};
