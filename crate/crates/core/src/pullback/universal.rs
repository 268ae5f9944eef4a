use super::framed::{Pair, PullbackAlgebroid};
use super::submersion::{compose_maps, push_vector, SplitSubmersion};
use crate::algebroid::{MorphismData, Representation};
use crate::exactalg::{Poly, PolyMatrix};
use crate::{Error, Result};

/// The factorization `ψ̃′(ξ) = (ψ′_* a′(ξ), ψ̃(ξ))` of `ψ̃: A′ → A` through
/// `φ^♯: φ!A → A`, given `ψ = φ∘ψ′`.
pub fn factor_through_pullback(psi: &MorphismData, f: &SplitSubmersion, psi_prime: &[Poly]) -> Result<MorphismData> {
    let z = psi.source.dim();
    if psi_prime.len() != f.source_dim() || psi_prime.iter().any(|p| p.nvars() != z) {
        return Err(Error::Shape("ψ′ has the wrong shape".into()));
    }
    if compose_maps(&f.map(), psi_prime, z) != psi.base_map {
        return Err(Error::Invalid("ψ ≠ φ∘ψ′".into()));
    }
    let pb = PullbackAlgebroid::along_submersion(f, &psi.target)?;
    let rows = (0..psi.source.rank())
        .map(|i| {
            let pair = Pair { vector: push_vector(psi.source.anchor_of(i), psi_prime), coeffs: psi.matrix.row_vec(i) };
            pb.decompose_along(&pair, psi_prime)
        })
        .collect::<Result<Vec<_>>>()?;
    MorphismData::new(psi.source.clone(), pb.presentation().clone(), psi_prime.to_vec(), PolyMatrix::from_rows(z, rows))
}

/// Whether `ψ̃′` is determined by `φ^♯∘ψ̃′` and the anchor: the frame of
/// `φ!A` along `ψ′`, read in `TX ⊕ A`, must have full generic rank.
pub fn factorization_is_unique(pb: &PullbackAlgebroid, psi_prime: &[Poly]) -> bool {
    let z = psi_prime.first().map(Poly::nvars).unwrap_or(0);
    let rows: Vec<Vec<Poly>> = pb
        .frame()
        .iter()
        .map(|p| {
            let q = p.substitute(psi_prime, z);
            q.coeffs.into_iter().chain(q.vector).collect()
        })
        .collect();
    let m = PolyMatrix::from_rows(z, rows);
    m.generic_rank_lower_bound() == pb.rank()
}

/// `f!∇` on `f!A`: `(f!∇)_{(v, Σ w_i e_i)} ε_α = Σ_i w_i (∇_{e_i} ε_α)∘f`.
pub fn pullback_representation(pb: &PullbackAlgebroid, rep: &Representation) -> Result<Representation> {
    if &rep.algebroid != pb.inner() {
        return Err(Error::Shape("representation lives on a different algebroid".into()));
    }
    let n = pb.source_dim();
    let m = rep.fiber_rank;
    let pulled: Vec<PolyMatrix> = rep.gamma.iter().map(|g| g.substitute_or_constant(pb.map(), n)).collect();
    let gamma = pb
        .frame()
        .iter()
        .map(|p| {
            let mut acc = PolyMatrix::zeros(m, m, n);
            for (w, g) in p.coeffs.iter().zip(&pulled) {
                if !w.is_zero() {
                    acc = acc.add(&g.map(n, |e| w * e));
                }
            }
            acc
        })
        .collect();
    Representation::new(pb.presentation().clone(), m, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{check_morphism, rank1_from_anchor, verify_representation, AlgebroidPresentation};
    use crate::exactalg::int;

    #[test]
    fn projection_factors_as_identity() {
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        let f = SplitSubmersion::new(1, vec![&x + &y.pow(2), y.clone()], vec![&x - &y.pow(2), y]).unwrap();
        let a = rank1_from_anchor(vec![Poly::var(1, 0)]).unwrap();
        let pb = PullbackAlgebroid::along_submersion(&f, &a).unwrap();
        let sharp = pb.projection().unwrap();
        let id: Vec<Poly> = (0..2).map(|i| Poly::var(2, i)).collect();
        let back = factor_through_pullback(&sharp, &f, &id).unwrap();
        assert!(back.matrix.is_identity());
        assert!(factorization_is_unique(&pb, &id));
    }

    #[test]
    fn constant_section_into_a_fibre() {
        // Point → Affine(1) at 0, lifted to (0, 3) in Affine(2).
        let f = SplitSubmersion::projection(1, 1);
        let a = rank1_from_anchor(vec![Poly::var(1, 0)]).unwrap();
        let src = AlgebroidPresentation::abelian(0, 1);
        let psi = MorphismData::new(src, a, vec![Poly::zero(0)], PolyMatrix::identity(1, 0)).unwrap();
        assert!(check_morphism(&psi).is_valid());
        let lift = factor_through_pullback(&psi, &f, &[Poly::zero(0), Poly::from_int(0, 3)]).unwrap();
        assert!(check_morphism(&lift).is_valid());
        assert_eq!(lift.matrix.row_vec(0), vec![Poly::zero(0), Poly::one(0)]);
    }

    #[test]
    fn adjoint_pullback_to_the_line() {
        let g = AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (2, 0, 1, int(1))]).unwrap();
        let gamma = (0..3)
            .map(|i| PolyMatrix::from_rows(0, (0..3).map(|a| (0..3).map(|b| g.c(i, a, b).clone()).collect()).collect()))
            .collect();
        let rep = Representation::new(g.clone(), 3, gamma).unwrap();
        let pb = PullbackAlgebroid::along_submersion(&SplitSubmersion::projection(0, 1), &g).unwrap();
        let up = pullback_representation(&pb, &rep).unwrap();
        assert!(verify_representation(&up).is_valid());
        assert!(up.gamma[0].is_zero());
        assert_eq!(up.gamma[1], rep.gamma[0].map(1, |p| p.embed(1, 0)));
    }
}
