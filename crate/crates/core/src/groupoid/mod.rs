//! Finite groups and their affine actions as étale groupoids, algebroids over
//! them, and the correspondence with !-vacant LA-groupoids.

mod algebroid;
mod group;
mod la;

pub use algebroid::{
    action_from_cocycle, check_equivariant, verify_as_cocycle, verify_as_sheaf, verify_groupoid_algebroid,
    verify_groupoid_rep, GroupoidAlgebroid, GroupoidRepresentation, TangentAction,
};
pub use group::{verify_groupoid, DeskGroupoid, FiniteGroup};
pub use la::{
    bang_comparison, build_la_groupoid, check_bang_vacant, check_la_morphism, check_vacant, equal_dimensions,
    f1_morphism, f2_morphism, f2_recover, naturality_square, roundtrip_iso, verify_la_groupoid, LAGroupoid, PairFrame,
};
