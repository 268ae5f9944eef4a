use crate::exactalg::Poly;
use crate::pullback::{compose_maps, AffineMap};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

/// A finite group given by its multiplication table, `table[g][h] = gh`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
}

fn combinatorial(location: String) -> Verdict {
    Verdict::Invalid(Witness::new(location, Poly::one(0)))
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Shape("multiplication table must be square with entries in range".into()));
        }
        Ok(FiniteGroup { table })
    }

    pub fn trivial() -> Self {
        FiniteGroup { table: vec![vec![0]] }
    }

    pub fn cyclic(n: usize) -> Self {
        FiniteGroup { table: (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect() }
    }

    /// `ℤ/2 × ℤ/2` with elements `0, a, b, ab`.
    pub fn klein() -> Self {
        FiniteGroup { table: (0..4).map(|g| (0..4).map(|h| g ^ h).collect()).collect() }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn find_identity(&self) -> Option<usize> {
        (0..self.order()).find(|&e| (0..self.order()).all(|g| self.mul(e, g) == g && self.mul(g, e) == g))
    }

    /// Identity element; the table must be a group.
    pub fn identity(&self) -> usize {
        self.find_identity().expect("group has an identity")
    }

    pub fn inverse(&self, g: usize) -> usize {
        let e = self.identity();
        (0..self.order()).find(|&h| self.mul(g, h) == e && self.mul(h, g) == e).expect("group has inverses")
    }

    pub fn verify(&self) -> Verdict {
        let n = self.order();
        let Some(e) = self.find_identity() else {
            return combinatorial("no two-sided identity".into());
        };
        for g in 0..n {
            if !(0..n).any(|h| self.mul(g, h) == e && self.mul(h, g) == e) {
                return combinatorial(format!("g{} has no inverse", g + 1));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return combinatorial(format!("associativity fails at (g{}, g{}, g{})", a + 1, b + 1, c + 1));
                    }
                }
            }
        }
        Verdict::Valid
    }
}

/// A finite group acting on `Affine(n)` by affine automorphisms, viewed as
/// the étale groupoid `G ⋉ X ⇉ X` whose arrow space has one chart per element.
/// Over a point (`n = 0`) this is the group itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeskGroupoid {
    group: FiniteGroup,
    dim: usize,
    action: Vec<AffineMap>,
    action_inv: Vec<AffineMap>,
}

impl DeskGroupoid {
    pub fn over_point(group: FiniteGroup) -> Self {
        let n = group.order();
        DeskGroupoid { group, dim: 0, action: vec![AffineMap::identity(0); n], action_inv: vec![AffineMap::identity(0); n] }
    }

    /// `action[g]` is `l_g: x ↦ M_g x + b_g`; `action_inv[g]` is its supplied inverse.
    pub fn transformation(group: FiniteGroup, dim: usize, action: Vec<AffineMap>, action_inv: Vec<AffineMap>) -> Result<Self> {
        let n = group.order();
        if action.len() != n || action_inv.len() != n || action.iter().chain(&action_inv).any(|a| a.dim() != dim) {
            return Err(Error::Shape(format!("need {n} affine maps of Affine({dim}) and their inverses")));
        }
        Ok(DeskGroupoid { group, dim, action, action_inv })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn action(&self, g: usize) -> &AffineMap {
        &self.action[g]
    }

    pub fn action_inverse(&self, g: usize) -> &AffineMap {
        &self.action_inv[g]
    }

    /// `l_g` as a substitution.
    pub fn act(&self, g: usize) -> Vec<Poly> {
        self.action[g].images()
    }

    pub fn act_inv(&self, g: usize) -> Vec<Poly> {
        self.action_inv[g].images()
    }
}

fn map_difference(lhs: &[Poly], rhs: &[Poly], what: String) -> Verdict {
    for (mu, (l, r)) in lhs.iter().zip(rhs).enumerate() {
        let d = l - r;
        if !d.is_zero() {
            return Verdict::Invalid(Witness::new(format!("{what}, coordinate {}", mu + 1), d));
        }
    }
    Verdict::Valid
}

/// Group axioms on the table, and `l_e = id`, `l_g l_g⁻¹ = id`,
/// `l_{gh} = l_g l_h`, `l_g⁻¹ = l_{g⁻¹}` on the action. These are the groupoid
/// axioms of `G ⋉ X` with `s(g, x) = x`, `t(g, x) = gx`, `(g, hx)(h, x) = (gh, x)`.
pub fn verify_groupoid(g: &DeskGroupoid) -> Verdict {
    let v = g.group.verify();
    if !v.is_valid() {
        return v;
    }
    let n = g.dim;
    let id: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    let grp = &g.group;
    let e = grp.identity();
    let v = map_difference(&g.act(e), &id, "l_e ≠ id".into());
    if !v.is_valid() {
        return v;
    }
    for a in 0..grp.order() {
        let (la, lai) = (g.act(a), g.act_inv(a));
        let checks = [
            (compose_maps(&la, &lai, n), id.clone(), format!("l_g{0}∘l_g{0}⁻¹ ≠ id", a + 1)),
            (compose_maps(&lai, &la, n), id.clone(), format!("l_g{0}⁻¹∘l_g{0} ≠ id", a + 1)),
            (lai.clone(), g.act(grp.inverse(a)), format!("supplied inverse of l_g{} ≠ l of the inverse element", a + 1)),
        ];
        for (l, r, what) in checks {
            let v = map_difference(&l, &r, what);
            if !v.is_valid() {
                return v;
            }
        }
        for b in 0..grp.order() {
            let v = map_difference(
                &g.act(grp.mul(a, b)),
                &compose_maps(&la, &g.act(b), n),
                format!("l_(g{}g{}) ≠ l_g{}∘l_g{}", a + 1, b + 1, a + 1, b + 1),
            );
            if !v.is_valid() {
                return v;
            }
        }
    }
    Verdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, RatMatrix};

    fn sign_line() -> DeskGroupoid {
        let flip = AffineMap::new(RatMatrix::from_ints(&[&[-1]]), vec![int(0)]).unwrap();
        let id = AffineMap::identity(1);
        DeskGroupoid::transformation(FiniteGroup::cyclic(2), 1, vec![id.clone(), flip.clone()], vec![id, flip]).unwrap()
    }

    #[test]
    fn small_groups() {
        for g in [FiniteGroup::trivial(), FiniteGroup::cyclic(3), FiniteGroup::klein()] {
            assert!(g.verify().is_valid());
        }
        assert_eq!(FiniteGroup::cyclic(4).inverse(1), 3);
    }

    #[test]
    fn broken_associativity() {
        let t = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 0, 0]];
        let g = FiniteGroup::from_table(t).unwrap();
        assert!(!g.verify().is_valid());
    }

    #[test]
    fn reflection_groupoid() {
        assert!(verify_groupoid(&sign_line()).is_valid());
        let mut bad = sign_line();
        bad.action[1] = AffineMap::new(RatMatrix::from_ints(&[&[-1]]), vec![int(1)]).unwrap();
        assert!(!verify_groupoid(&bad).is_valid());
    }
}
