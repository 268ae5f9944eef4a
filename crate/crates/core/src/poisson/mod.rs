//! Polyvector fields, Poisson bivectors and their cotangent algebroids.

mod polyvector;
mod structure;
mod symplectic;

pub use polyvector::{schouten_bracket, PolyVectorField};
pub use structure::{
    check_invariant_poisson, check_linear_rules, cotangent_algebroid, cotangent_groupoid_algebroid, jacobi_verdict,
    linear_function, linear_poisson_on_dual, schouten_verdict, verify_poisson, PoissonStructure,
};
pub use symplectic::{symplectic_to_poisson, transport_cohomology, AnchorIsoCertificate, SymplecticPoisson, TransportReport};
