use super::framed::{Pair, PullbackAlgebroid};
use super::submersion::{EtaleMap, SplitSubmersion};
use crate::algebroid::{pull, AlgebroidPresentation, MorphismData};
use crate::exactalg::{Poly, PolyMatrix};
use crate::{Error, Result};

/// `φ*A` along an étale map: anchor `J⁻¹·(a∘φ)`, structure `c∘φ`.
pub fn etale_pullback(phi: &EtaleMap, a: &AlgebroidPresentation) -> Result<AlgebroidPresentation> {
    let n = phi.dim();
    if a.dim() != n {
        return Err(Error::Shape("étale pullback between charts of different dimension".into()));
    }
    let r = a.rank();
    let pulled = a.anchor().substitute_or_constant(phi.map(), n);
    // rows are vectors, so the inverse Jacobian acts on the right by its transpose
    let anchor = pulled.mul(&phi.jac_inv().transpose());
    let structure = a.structure().iter().map(|c| pull(c, phi.map(), n)).collect();
    let out = AlgebroidPresentation::from_structure(n, r, anchor, structure)?;
    debug_assert_eq!(out.anchor().rows(), r);
    Ok(out)
}

/// The comparison `φ*A → φ!A`, `e_i ↦ ((φ_*)⁻¹a(e_i), e_i)`, for a split
/// submersion without fibres.
pub fn etale_comparison(f: &SplitSubmersion, a: &AlgebroidPresentation) -> Result<MorphismData> {
    let etale = EtaleMap::from_split(f)?;
    let star = etale_pullback(&etale, a)?;
    let bang = PullbackAlgebroid::along_submersion(f, a)?;
    let n = f.source_dim();
    let rows = (0..a.rank())
        .map(|i| {
            let coeffs = (0..a.rank()).map(|c| if c == i { Poly::one(n) } else { Poly::zero(n) }).collect();
            bang.decompose(&Pair { vector: star.anchor_of(i).to_vec(), coeffs })
        })
        .collect::<Result<Vec<_>>>()?;
    MorphismData::over_identity(star, bang.presentation().clone(), PolyMatrix::from_rows(n, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{check_morphism, rank1_from_anchor, verify_algebroid};
    use crate::exactalg::{int, rat};

    #[test]
    fn translation_of_euler_field() {
        let x = Poly::var(1, 0);
        let a = rank1_from_anchor(vec![x.clone()]).unwrap();
        let e = EtaleMap::from_map(vec![&x + &Poly::one(1)]).unwrap();
        let p = etale_pullback(&e, &a).unwrap();
        assert_eq!(p.anchor_of(0), &[&x + &Poly::one(1)]);
    }

    #[test]
    fn doubling_halves_the_anchor() {
        let x = Poly::var(1, 0);
        let e = EtaleMap::from_map(vec![x.scale(&int(2))]).unwrap();
        let p = etale_pullback(&e, &AlgebroidPresentation::tangent(1)).unwrap();
        assert_eq!(p.anchor_of(0), &[Poly::constant(1, rat(1, 2))]);
        assert!(verify_algebroid(&p).is_valid());
    }

    #[test]
    fn comparison_is_an_isomorphism() {
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        let f = SplitSubmersion::new(2, vec![&x + &y.pow(2), y.clone()], vec![&x - &y.pow(2), y.clone()]).unwrap();
        let a = AlgebroidPresentation::new(
            2,
            2,
            PolyMatrix::from_rows(2, vec![vec![Poly::one(2), Poly::zero(2)], vec![Poly::zero(2), y.clone()]]),
            vec![],
        )
        .unwrap();
        assert!(verify_algebroid(&a).is_valid());
        let c = etale_comparison(&f, &a).unwrap();
        assert!(check_morphism(&c).is_valid());
        assert!(c.matrix.is_identity());
    }
}
