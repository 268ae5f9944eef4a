//! Pullbacks along split submersions and étale maps, composition
//! isomorphisms, and descent.

mod composition;
mod descent;
mod etale;
mod framed;
mod submersion;
mod universal;

pub use composition::{composition_iso, pentagon, CompositionIso};
pub use descent::{
    descend_along_section, fibre_products, roundtrip_bang, verify_cover_descent, verify_submersion_descent,
    AffineMap, CoverDatum, Descended, DescentReport, FibreProducts, GluedAtlas, Overlap, SubmersionDatum,
    TripleOverlap,
};
pub use etale::{etale_comparison, etale_pullback};
pub use framed::{Pair, PullbackAlgebroid};
pub use submersion::{compose_maps, identity_map, jacobian, push_vector, EtaleMap, PolyMap, SplitSubmersion};
pub use universal::{factor_through_pullback, factorization_is_unique, pullback_representation};
