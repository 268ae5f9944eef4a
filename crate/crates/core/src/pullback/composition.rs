use super::framed::{Pair, PullbackAlgebroid};
use super::submersion::{push_vector, SplitSubmersion};
use crate::algebroid::{AlgebroidPresentation, MorphismData};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

/// `c_{φ₂,φ₁}(A): (φ₂φ₁)!A → φ₁!φ₂!A`, `(v, w) ↦ (v, ((φ₁)_* v, w))`, with its inverse.
#[derive(Clone, Debug)]
pub struct CompositionIso {
    pub composite: PullbackAlgebroid,
    pub middle: PullbackAlgebroid,
    pub nested: PullbackAlgebroid,
    pub iso: MorphismData,
    pub inverse: MorphismData,
}

/// Builds `c_{φ₂,φ₁}(A)` for `φ₁: X → Y`, `φ₂: Y → Z` and `A` over `Z`.
pub fn composition_iso(phi1: &SplitSubmersion, phi2: &SplitSubmersion, a: &AlgebroidPresentation) -> Result<CompositionIso> {
    let composite = PullbackAlgebroid::along_submersion(&phi1.then(phi2)?, a)?;
    let middle = PullbackAlgebroid::along_submersion(phi2, a)?;
    let nested = PullbackAlgebroid::along_submersion(phi1, middle.presentation())?;
    let f1 = phi1.map();
    let n = phi1.source_dim();
    let forward = composite.map_pairs(&nested, |p| {
        let down = Pair { vector: push_vector(&p.vector, &f1), coeffs: p.coeffs.clone() };
        Ok(Pair { vector: p.vector.clone(), coeffs: middle.decompose_along(&down, &f1)? })
    })?;
    let backward = nested.map_pairs(&composite, |p| {
        Ok(Pair { vector: p.vector.clone(), coeffs: middle.combine_along(&p.coeffs, &f1, n).coeffs })
    })?;
    if !forward.mul(&backward).is_identity() {
        return Err(Error::Inconsistent("composition isomorphism and its inverse disagree".into()));
    }
    let iso = MorphismData::over_identity(composite.presentation().clone(), nested.presentation().clone(), forward)?;
    let inverse = MorphismData::over_identity(nested.presentation().clone(), composite.presentation().clone(), backward)?;
    Ok(CompositionIso { composite, middle, nested, iso, inverse })
}

/// Coherence for `φ₁: W → X`, `φ₂: X → Y`, `φ₃: Y → Z`:
/// `φ₁!c_{φ₃,φ₂} ∘ c_{φ₃φ₂,φ₁} = c_{φ₂,φ₁}(φ₃!A) ∘ c_{φ₃,φ₂φ₁}`.
pub fn pentagon(
    phi1: &SplitSubmersion,
    phi2: &SplitSubmersion,
    phi3: &SplitSubmersion,
    a: &AlgebroidPresentation,
) -> Result<Verdict> {
    let c32 = composition_iso(phi2, phi3, a)?;
    let c32_1 = composition_iso(phi1, &phi2.then(phi3)?, a)?;
    let lifted = PullbackAlgebroid::along_submersion(phi1, c32.nested.presentation())?;
    let pulled = c32_1.nested.pull_morphism(&c32.iso, &lifted)?;
    let lhs = c32_1.iso.matrix.mul(&pulled.matrix);

    let c3_21 = composition_iso(&phi1.then(phi2)?, phi3, a)?;
    let third = PullbackAlgebroid::along_submersion(phi3, a)?;
    let c21 = composition_iso(phi1, phi2, third.presentation())?;
    let rhs = c3_21.iso.matrix.mul(&c21.iso.matrix);

    if c32_1.composite.presentation() != c3_21.composite.presentation() {
        return Err(Error::Inconsistent("the two triple composites differ".into()));
    }
    if lifted.presentation() != c21.nested.presentation() {
        return Err(Error::Inconsistent("the two triple pullbacks differ".into()));
    }
    Ok(match lhs.sub(&rhs).first_nonzero() {
        None => Verdict::Valid,
        Some((i, j, p)) => Verdict::Invalid(Witness::new(format!("pentagon entry ({}, {})", i + 1, j + 1), p.clone())),
    })
}
