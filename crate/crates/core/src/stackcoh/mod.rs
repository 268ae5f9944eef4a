//! Nerves of desk groupoids, Čech double complexes of algebroid forms, and the
//! comparison with invariant forms.

mod cech;
mod invariant;
mod nerve;

pub use cech::{
    build_cech_complex, build_cech_complexes, cech_cohomology, group_cochain_complex, transport_form, CechDoubleComplex,
};
pub use invariant::{compare_total_vs_invariants, invariant_complex, CohomologyComparison};
pub use nerve::{build_nerve, Face, NerveData};
