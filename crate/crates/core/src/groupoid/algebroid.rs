use super::group::{verify_groupoid, DeskGroupoid};
use crate::algebroid::{check_morphism, pull, verify_algebroid, verify_representation, AlgebroidPresentation, MorphismData, Representation};
use crate::exactalg::{Poly, PolyMatrix};
use crate::pullback::etale_pullback;
use crate::verdict::{first_failure, Verdict, Witness};
use crate::{Error, Result};

/// `(A, ψ)` with `ψ_g(x): A_x → A_{gx}` stored arrow by arrow. Row `i` of
/// `psi[g]` is `ψ_g(e_i)` in the frame at `gx`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidAlgebroid {
    pub groupoid: DeskGroupoid,
    pub algebroid: AlgebroidPresentation,
    pub psi: Vec<PolyMatrix>,
}

pub(crate) fn matrix_verdict(diff: &PolyMatrix, what: &str) -> Verdict {
    match diff.first_nonzero() {
        None => Verdict::Valid,
        Some((i, j, p)) => Verdict::Invalid(Witness::new(format!("{what}, entry ({}, {})", i + 1, j + 1), p.clone())),
    }
}

fn vector_verdict(lhs: &[Poly], rhs: &[Poly], what: &str) -> Verdict {
    for (c, (l, r)) in lhs.iter().zip(rhs).enumerate() {
        let d = l - r;
        if !d.is_zero() {
            return Verdict::Invalid(Witness::new(format!("{what}, component {}", c + 1), d));
        }
    }
    Verdict::Valid
}

/// `(g·s)(y) = ψ_g(l_g⁻¹y) s(l_g⁻¹y)` for a section written in a frame whose
/// arrow matrices are `mats`.
pub(crate) fn act_on_section(g: &DeskGroupoid, mats: &[PolyMatrix], h: usize, s: &[Poly]) -> Vec<Poly> {
    let n = g.dim();
    let back = g.act_inv(h);
    let m = &mats[h];
    (0..m.cols())
        .map(|j| {
            let mut acc = Poly::zero(n);
            for (i, si) in s.iter().enumerate() {
                if !si.is_zero() && !m.get(i, j).is_zero() {
                    acc = acc + si * m.get(i, j);
                }
            }
            pull(&acc, &back, n)
        })
        .collect()
}

/// `(l_g)_* v` at `y`: `M_g·v(l_g⁻¹y)`.
pub(crate) fn push_field(g: &DeskGroupoid, h: usize, v: &[Poly]) -> Vec<Poly> {
    let n = g.dim();
    let back = g.act_inv(h);
    let lin = &g.action(h).matrix;
    (0..n)
        .map(|nu| {
            let mut acc = Poly::zero(n);
            for (mu, vm) in v.iter().enumerate() {
                acc = acc + vm.scale(lin.get(nu, mu));
            }
            pull(&acc, &back, n)
        })
        .collect()
}

/// `M_h(x)·M_g(l_h x)`, the matrix of `ψ_g∘ψ_h` at `x`.
pub(crate) fn compose_arrows(g: &DeskGroupoid, mats: &[PolyMatrix], first: usize, second: usize) -> PolyMatrix {
    let n = g.dim();
    mats[first].mul(&mats[second].substitute_or_constant(&g.act(first), n))
}

impl GroupoidAlgebroid {
    pub fn new(groupoid: DeskGroupoid, algebroid: AlgebroidPresentation, psi: Vec<PolyMatrix>) -> Result<Self> {
        let (n, r) = (algebroid.dim(), algebroid.rank());
        if groupoid.dim() != n {
            return Err(Error::Shape(format!("algebroid over Affine({n}) but groupoid over Affine({})", groupoid.dim())));
        }
        if psi.len() != groupoid.order() || psi.iter().any(|m| m.rows() != r || m.cols() != r || m.nvars() != n) {
            return Err(Error::Shape(format!("need {} arrow matrices of size {r}x{r}", groupoid.order())));
        }
        Ok(GroupoidAlgebroid { groupoid, algebroid, psi })
    }

    /// `ψ_g = id` for every arrow.
    pub fn trivial(groupoid: DeskGroupoid, algebroid: AlgebroidPresentation) -> Result<Self> {
        let psi = vec![PolyMatrix::identity(algebroid.rank(), algebroid.dim()); groupoid.order()];
        GroupoidAlgebroid::new(groupoid, algebroid, psi)
    }

    pub fn act_section(&self, g: usize, s: &[Poly]) -> Vec<Poly> {
        act_on_section(&self.groupoid, &self.psi, g, s)
    }
}

fn unit_and_cocycle(ga: &GroupoidAlgebroid) -> Verdict {
    let grp = ga.groupoid.group();
    let e = grp.identity();
    let unit = matrix_verdict(&ga.psi[e].sub(&PolyMatrix::identity(ga.algebroid.rank(), ga.algebroid.dim())), "ψ_e ≠ id");
    unit.and_then(|| {
        first_failure((0..grp.order()).flat_map(|g| (0..grp.order()).map(move |h| (g, h))).map(|(g, h)| {
            let lhs = &ga.psi[grp.mul(g, h)];
            let rhs = compose_arrows(&ga.groupoid, &ga.psi, h, g);
            matrix_verdict(&lhs.sub(&rhs), &format!("cocycle ψ_(g{}g{}) ≠ ψ_g{}∘ψ_g{}", g + 1, h + 1, g + 1, h + 1))
        }))
    })
}

/// Each `ψ_g` is a morphism `A → l_g*A` in the étale-pullback structure, and
/// the cocycle holds.
pub fn verify_as_cocycle(ga: &GroupoidAlgebroid) -> Result<Verdict> {
    let unit = unit_and_cocycle(ga);
    if !unit.is_valid() {
        return Ok(unit);
    }
    for g in 0..ga.groupoid.order() {
        let target = etale_pullback(&ga.groupoid.action(g).etale()?, &ga.algebroid)?;
        let m = MorphismData::over_identity(ga.algebroid.clone(), target, ga.psi[g].clone())?;
        if let Verdict::Invalid(w) = check_morphism(&m) {
            return Ok(Verdict::Invalid(Witness::new(format!("ψ_g{}: {}", g + 1, w.location), w.residue)));
        }
    }
    Ok(Verdict::Valid)
}

/// `ψ` as an action on sections: functorial, anchor-equivariant and
/// bracket-preserving, all checked on transported frame sections.
pub fn verify_as_sheaf(ga: &GroupoidAlgebroid) -> Verdict {
    let a = &ga.algebroid;
    let r = a.rank();
    let grp = ga.groupoid.group();
    let frame: Vec<Vec<Poly>> = (0..r).map(|i| a.frame_section(i)).collect();
    let e = grp.identity();
    for (i, s) in frame.iter().enumerate() {
        let v = vector_verdict(&ga.act_section(e, s), s, &format!("e·e{} ≠ e{}", i + 1, i + 1));
        if !v.is_valid() {
            return v;
        }
    }
    for g in 0..grp.order() {
        for h in 0..grp.order() {
            for (i, s) in frame.iter().enumerate() {
                let twice = ga.act_section(g, &ga.act_section(h, s));
                let once = ga.act_section(grp.mul(g, h), s);
                let v = vector_verdict(&twice, &once, &format!("g{}·(g{}·e{}) ≠ (g{}g{})·e{}", g + 1, h + 1, i + 1, g + 1, h + 1, i + 1));
                if !v.is_valid() {
                    return v;
                }
            }
        }
    }
    for g in 0..grp.order() {
        let moved: Vec<Vec<Poly>> = frame.iter().map(|s| ga.act_section(g, s)).collect();
        for i in 0..r {
            let lhs = a.anchor_section(&moved[i]);
            let rhs = push_field(&ga.groupoid, g, a.anchor_of(i));
            let v = vector_verdict(&lhs, &rhs, &format!("a(g{}·e{}) ≠ (l_g{})_* a(e{})", g + 1, i + 1, g + 1, i + 1));
            if !v.is_valid() {
                return v;
            }
        }
        for i in 0..r {
            for j in i + 1..r {
                let lhs = ga.act_section(g, &a.bracket_of(i, j));
                let rhs = a.bracket(&moved[i], &moved[j]);
                let v = vector_verdict(&lhs, &rhs, &format!("g{}·[e{},e{}] ≠ [g{}·e{}, g{}·e{}]", g + 1, i + 1, j + 1, g + 1, i + 1, g + 1, j + 1));
                if !v.is_valid() {
                    return v;
                }
            }
        }
    }
    Verdict::Valid
}

/// Both formulations, which must agree. Precondition failures (invalid
/// groupoid or algebroid) are returned as the verdict.
pub fn verify_groupoid_algebroid(ga: &GroupoidAlgebroid) -> Result<Verdict> {
    let pre = verify_groupoid(&ga.groupoid).and_then(|| verify_algebroid(&ga.algebroid));
    if !pre.is_valid() {
        return Ok(pre);
    }
    let first = verify_as_cocycle(ga)?;
    let second = verify_as_sheaf(ga);
    if first.is_valid() != second.is_valid() {
        return Err(Error::Inconsistent(format!(
            "cocycle formulation says {}, sheaf formulation says {}",
            first.is_valid(),
            second.is_valid()
        )));
    }
    Ok(first)
}

/// `ψ̃: TG ×_{s_*,a} A → A` in the desk model. On the arrow chart of `g` the
/// tangent vector is forced to be `a(ξ)`, so `ψ̃(a(ξ), ξ) = ψ_g ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentAction {
    pub groupoid: DeskGroupoid,
    pub algebroid: AlgebroidPresentation,
    pub maps: Vec<PolyMatrix>,
}

pub fn action_from_cocycle(ga: &GroupoidAlgebroid) -> Result<TangentAction> {
    if !verify_groupoid_algebroid(ga)?.is_valid() {
        return Err(Error::Invalid("groupoid algebroid does not verify".into()));
    }
    Ok(TangentAction { groupoid: ga.groupoid.clone(), algebroid: ga.algebroid.clone(), maps: ga.psi.clone() })
}

impl TangentAction {
    /// `ψ̃(v, ξ)` at the arrow `g`, as coefficients in the frame at `gx`.
    pub fn apply(&self, g: usize, xi: &[Poly]) -> Vec<Poly> {
        let n = self.algebroid.dim();
        let m = &self.maps[g];
        (0..m.cols())
            .map(|j| xi.iter().enumerate().fold(Poly::zero(n), |acc, (i, f)| acc + f * m.get(i, j)))
            .collect()
    }

    /// `ψ̃(m_*(v,w), ξ) = ψ̃(v, ψ̃(w, ξ))` on frame elements, and
    /// `a(ψ̃(v,ξ)) = t_* v`.
    pub fn verify_action_law(&self) -> Verdict {
        let a = &self.algebroid;
        let (n, r) = (a.dim(), a.rank());
        let grp = self.groupoid.group();
        for g in 0..grp.order() {
            for h in 0..grp.order() {
                for i in 0..r {
                    let xi = a.frame_section(i);
                    let inner = self.apply(h, &xi);
                    let shifted = self.maps[g].substitute_or_constant(&self.groupoid.act(h), n);
                    let outer: Vec<Poly> = (0..r)
                        .map(|j| inner.iter().enumerate().fold(Poly::zero(n), |acc, (k, c)| acc + c * shifted.get(k, j)))
                        .collect();
                    let lhs = self.apply(grp.mul(g, h), &xi);
                    let v = vector_verdict(&lhs, &outer, &format!("action law at (g{}, g{}), e{}", g + 1, h + 1, i + 1));
                    if !v.is_valid() {
                        return v;
                    }
                }
            }
            for i in 0..r {
                let image = act_on_section(&self.groupoid, &self.maps, g, &a.frame_section(i));
                let v = vector_verdict(
                    &a.anchor_section(&image),
                    &push_field(&self.groupoid, g, a.anchor_of(i)),
                    &format!("a(ψ̃(v, e{})) ≠ t_* v at g{}", i + 1, g + 1),
                );
                if !v.is_valid() {
                    return v;
                }
            }
        }
        Verdict::Valid
    }

    /// The cocycle read back from the action.
    pub fn to_groupoid_algebroid(&self) -> Result<GroupoidAlgebroid> {
        let r = self.algebroid.rank();
        let psi = (0..self.groupoid.order())
            .map(|g| {
                let rows = (0..r).map(|i| self.apply(g, &self.algebroid.frame_section(i))).collect();
                PolyMatrix::from_rows(self.algebroid.dim(), rows)
            })
            .collect();
        GroupoidAlgebroid::new(self.groupoid.clone(), self.algebroid.clone(), psi)
    }
}

/// An equivariant morphism `ρ: (A, ψ) → (B, ψ′)` over the identity:
/// `ρ(x)·ψ′_g(x) = ψ_g(x)·ρ(l_g x)` and `ρ` a morphism of algebroids.
pub fn check_equivariant(rho: &PolyMatrix, a: &GroupoidAlgebroid, b: &GroupoidAlgebroid) -> Result<Verdict> {
    if a.groupoid != b.groupoid {
        return Err(Error::Shape("equivariant morphisms need a common groupoid".into()));
    }
    let m = MorphismData::over_identity(a.algebroid.clone(), b.algebroid.clone(), rho.clone())?;
    let n = a.algebroid.dim();
    Ok(check_morphism(&m).and_then(|| {
        first_failure((0..a.groupoid.order()).map(|g| {
            let lhs = rho.mul(&b.psi[g]);
            let rhs = a.psi[g].mul(&rho.substitute_or_constant(&a.groupoid.act(g), n));
            matrix_verdict(&lhs.sub(&rhs), &format!("ρ not equivariant at g{}", g + 1))
        }))
    }))
}

/// A representation of `A` with arrow matrices for `E`: row `α` of
/// `psi_e[g]` is `ψ^E_g(ε_α)` in the frame at `gx`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidRepresentation {
    pub parent: GroupoidAlgebroid,
    pub rep: Representation,
    pub psi_e: Vec<PolyMatrix>,
}

impl GroupoidRepresentation {
    pub fn new(parent: GroupoidAlgebroid, rep: Representation, psi_e: Vec<PolyMatrix>) -> Result<Self> {
        let (n, m) = (parent.algebroid.dim(), rep.fiber_rank);
        if rep.algebroid != parent.algebroid {
            return Err(Error::Shape("representation of a different algebroid".into()));
        }
        if psi_e.len() != parent.groupoid.order() || psi_e.iter().any(|p| p.rows() != m || p.cols() != m || p.nvars() != n) {
            return Err(Error::Shape(format!("need {} fibre matrices of size {m}x{m}", parent.groupoid.order())));
        }
        Ok(GroupoidRepresentation { parent, rep, psi_e })
    }
}

/// Vector-bundle cocycle for `ψ^E`, then `ψ^E(∇_ξ s) = ∇_{ψξ}(ψ^E s)` on frame
/// elements, compared on the target chart.
pub fn verify_groupoid_rep(gr: &GroupoidRepresentation) -> Verdict {
    let ga = &gr.parent;
    let grp = ga.groupoid.group();
    let (n, m) = (ga.algebroid.dim(), gr.rep.fiber_rank);
    let e = grp.identity();
    let base = verify_representation(&gr.rep);
    if !base.is_valid() {
        return base;
    }
    let unit = matrix_verdict(&gr.psi_e[e].sub(&PolyMatrix::identity(m, n)), "ψ^E_e ≠ id");
    if !unit.is_valid() {
        return unit;
    }
    for g in 0..grp.order() {
        for h in 0..grp.order() {
            let rhs = compose_arrows(&ga.groupoid, &gr.psi_e, h, g);
            let v = matrix_verdict(&gr.psi_e[grp.mul(g, h)].sub(&rhs), &format!("ψ^E cocycle at (g{}, g{})", g + 1, h + 1));
            if !v.is_valid() {
                return v;
            }
        }
    }
    for g in 0..grp.order() {
        for i in 0..ga.algebroid.rank() {
            let moved_xi = ga.act_section(g, &ga.algebroid.frame_section(i));
            for alpha in 0..m {
                let cov: Vec<Poly> = (0..m).map(|b| gr.rep.gamma[i].get(alpha, b).clone()).collect();
                let lhs = act_on_section(&ga.groupoid, &gr.psi_e, g, &cov);
                let moved_s = act_on_section(&ga.groupoid, &gr.psi_e, g, &gr.rep.frame_section(alpha));
                let rhs = gr.rep.covariant(&moved_xi, &moved_s);
                let v = vector_verdict(&lhs, &rhs, &format!("ψ^E∇ ≠ ∇ψ^E at g{}, e{}, ε{}", g + 1, i + 1, alpha + 1));
                if !v.is_valid() {
                    return v;
                }
            }
        }
    }
    Verdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, RatMatrix};
    use crate::groupoid::group::FiniteGroup;
    use crate::pullback::AffineMap;

    pub(crate) fn reflection() -> DeskGroupoid {
        let flip = AffineMap::new(RatMatrix::from_ints(&[&[-1]]), vec![int(0)]).unwrap();
        let id = AffineMap::identity(1);
        DeskGroupoid::transformation(FiniteGroup::cyclic(2), 1, vec![id.clone(), flip.clone()], vec![id, flip]).unwrap()
    }

    fn sign_line() -> GroupoidAlgebroid {
        let g = DeskGroupoid::over_point(FiniteGroup::cyclic(2));
        let psi = vec![PolyMatrix::identity(1, 0), PolyMatrix::from_rows(0, vec![vec![Poly::from_int(0, -1)]])];
        GroupoidAlgebroid::new(g, AlgebroidPresentation::abelian(0, 1), psi).unwrap()
    }

    fn so3() -> AlgebroidPresentation {
        AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (2, 0, 1, int(1))]).unwrap()
    }

    #[test]
    fn trivial_and_sign() {
        let t = GroupoidAlgebroid::trivial(DeskGroupoid::over_point(FiniteGroup::trivial()), so3()).unwrap();
        assert!(verify_groupoid_algebroid(&t).unwrap().is_valid());
        assert!(verify_groupoid_algebroid(&sign_line()).unwrap().is_valid());
    }

    #[test]
    fn non_automorphism_fails_on_brackets() {
        let g = DeskGroupoid::over_point(FiniteGroup::cyclic(2));
        // e1 ↦ -e1 and fixes the rest: an involution but not an automorphism
        let flip = PolyMatrix::from_constants(&RatMatrix::from_ints(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), 0);
        let ga = GroupoidAlgebroid::new(g, so3(), vec![PolyMatrix::identity(3, 0), flip]).unwrap();
        let v = verify_groupoid_algebroid(&ga).unwrap();
        assert!(!v.is_valid());
        assert!(!verify_as_sheaf(&ga).is_valid());
    }

    #[test]
    fn tangent_of_the_reflection() {
        let minus = PolyMatrix::from_rows(1, vec![vec![Poly::from_int(1, -1)]]);
        let ga = GroupoidAlgebroid::new(reflection(), AlgebroidPresentation::tangent(1), vec![PolyMatrix::identity(1, 1), minus.clone()]).unwrap();
        assert!(verify_groupoid_algebroid(&ga).unwrap().is_valid());
        let act = action_from_cocycle(&ga).unwrap();
        assert!(act.verify_action_law().is_valid());
        assert_eq!(act.apply(1, &[Poly::one(1)]), vec![Poly::from_int(1, -1)]);
        assert_eq!(act.to_groupoid_algebroid().unwrap(), ga);
        // ψ = +1 is not compatible with the pushforward by x ↦ -x
        let wrong = GroupoidAlgebroid::trivial(reflection(), AlgebroidPresentation::tangent(1)).unwrap();
        assert!(!verify_groupoid_algebroid(&wrong).unwrap().is_valid());
    }

    #[test]
    fn sign_representation_of_z2() {
        let g = DeskGroupoid::over_point(FiniteGroup::cyclic(2));
        let zero = GroupoidAlgebroid::trivial(g, AlgebroidPresentation::abelian(0, 0)).unwrap();
        let rep = Representation::trivial(zero.algebroid.clone(), 1);
        let sign = vec![PolyMatrix::identity(1, 0), PolyMatrix::from_rows(0, vec![vec![Poly::from_int(0, -1)]])];
        let gr = GroupoidRepresentation::new(zero.clone(), rep.clone(), sign).unwrap();
        assert!(verify_groupoid_rep(&gr).is_valid());
        let bad = vec![PolyMatrix::identity(1, 0), PolyMatrix::from_rows(0, vec![vec![Poly::from_int(0, 2)]])];
        assert!(!verify_groupoid_rep(&GroupoidRepresentation::new(zero, rep, bad).unwrap()).is_valid());
    }

    #[test]
    fn scaling_is_equivariant() {
        let a = sign_line();
        let rho = PolyMatrix::from_rows(0, vec![vec![Poly::from_int(0, 2)]]);
        assert!(check_equivariant(&rho, &a, &a).unwrap().is_valid());
    }
}
