use crate::algebroid::pull;
use crate::exactalg::{Poly, PolyMatrix};
use crate::{Error, Result};

/// `images[i]` is the `i`-th target coordinate written in source variables.
pub type PolyMap = Vec<Poly>;

pub fn identity_map(n: usize) -> PolyMap {
    (0..n).map(|i| Poly::var(n, i)).collect()
}

/// `outer ∘ inner`, where `inner` is written in `nvars` variables.
pub fn compose_maps(outer: &[Poly], inner: &[Poly], nvars: usize) -> PolyMap {
    outer.iter().map(|p| pull(p, inner, nvars)).collect()
}

/// Jacobian `J[μ][ν] = ∂φ_μ/∂x_ν`.
pub fn jacobian(map: &[Poly], nvars: usize) -> PolyMatrix {
    let rows = map.iter().map(|p| (0..nvars).map(|nu| p.derive(nu)).collect()).collect();
    PolyMatrix::from_rows(nvars, rows)
}

/// Pushforward of a vector field along a map: components `v(φ_μ)`.
pub fn push_vector(v: &[Poly], map: &[Poly]) -> Vec<Poly> {
    map.iter().map(|p| crate::algebroid::apply_vector(v, p)).collect()
}

/// A submersion `f = π ∘ Φ: Affine(n+k) → Affine(n)` with `Φ` invertible and
/// `π` forgetting the last `k` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSubmersion {
    target_dim: usize,
    forward: PolyMap,
    inverse: PolyMap,
    /// `frame[μ]` holds the `x`-components of `∂/∂u_μ`, i.e. `(∂Φ⁻¹/∂u_μ)∘Φ`.
    frame: Vec<Vec<Poly>>,
}

impl SplitSubmersion {
    pub fn new(target_dim: usize, forward: PolyMap, inverse: PolyMap) -> Result<Self> {
        let total = forward.len();
        if total < target_dim || inverse.len() != total {
            return Err(Error::Shape(format!(
                "split form needs {total} forward and inverse components over a target of dimension {target_dim}"
            )));
        }
        if forward.iter().chain(&inverse).any(|p| p.nvars() != total) {
            return Err(Error::Shape("split form components in wrong variable count".into()));
        }
        let id = identity_map(total);
        if compose_maps(&forward, &inverse, total) != id {
            return Err(Error::BadInverse("Φ∘Φ⁻¹ ≠ id".into()));
        }
        if compose_maps(&inverse, &forward, total) != id {
            return Err(Error::BadInverse("Φ⁻¹∘Φ ≠ id".into()));
        }
        let frame = (0..total)
            .map(|mu| inverse.iter().map(|p| pull(&p.derive(mu), &forward, total)).collect())
            .collect();
        Ok(SplitSubmersion { target_dim, forward, inverse, frame })
    }

    /// The coordinate projection `Affine(n+k) → Affine(n)`.
    pub fn projection(n: usize, k: usize) -> Self {
        let id = identity_map(n + k);
        Self::new(n, id.clone(), id).expect("projection")
    }

    pub fn identity(n: usize) -> Self {
        Self::projection(n, 0)
    }

    pub fn source_dim(&self) -> usize {
        self.forward.len()
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.source_dim() - self.target_dim
    }

    pub fn forward(&self) -> &[Poly] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Poly] {
        &self.inverse
    }

    /// The map `f` itself.
    pub fn map(&self) -> PolyMap {
        self.forward[..self.target_dim].to_vec()
    }

    /// `∂/∂u_μ` in source coordinates.
    pub fn straightened(&self, mu: usize) -> &[Poly] {
        &self.frame[mu]
    }

    /// Vertical frame `V_j = ∂/∂u_{n+j}` of `ker f_*`.
    pub fn vertical(&self, j: usize) -> &[Poly] {
        &self.frame[self.target_dim + j]
    }

    /// Lift of a vector along the target written as components over the
    /// source: `Σ_μ w_μ ∂/∂u_μ`.
    pub fn horizontal_lift(&self, w: &[Poly]) -> Vec<Poly> {
        let total = self.source_dim();
        let mut out = vec![Poly::zero(total); total];
        for (mu, wm) in w.iter().enumerate() {
            if wm.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(&self.frame[mu]) {
                if !c.is_zero() {
                    *o = &*o + &(wm * c);
                }
            }
        }
        out
    }

    /// `after ∘ self`, split by `(Φ_after × id) ∘ Φ_self`. The fibre
    /// coordinates of `after` come first.
    pub fn then(&self, after: &SplitSubmersion) -> Result<SplitSubmersion> {
        if self.target_dim != after.source_dim() {
            return Err(Error::Shape(format!(
                "cannot compose: Affine({}) → Affine({}) then Affine({}) → Affine({})",
                self.source_dim(),
                self.target_dim,
                after.source_dim(),
                after.target_dim
            )));
        }
        let total = self.source_dim();
        let mid = self.target_dim;
        let y = &self.forward[..mid];
        let mut forward = compose_maps(&after.forward, y, total);
        forward.extend_from_slice(&self.forward[mid..]);
        // Φ⁻¹(z, w2, w1) = Φ_self⁻¹(Φ_after⁻¹(z, w2), w1)
        let zw2: Vec<Poly> = (0..mid).map(|i| Poly::var(total, i)).collect();
        let mut inner = compose_maps(&after.inverse, &zw2, total);
        inner.extend((mid..total).map(|i| Poly::var(total, i)));
        let inverse = compose_maps(&self.inverse, &inner, total);
        SplitSubmersion::new(after.target_dim, forward, inverse)
    }

    /// Checks `self ∘ section = id`.
    pub fn is_section(&self, section: &[Poly]) -> bool {
        section.len() == self.source_dim()
            && compose_maps(&self.map(), section, self.target_dim) == identity_map(self.target_dim)
    }
}

/// A local diffeomorphism between equal-dimensional charts with an explicit
/// inverse Jacobian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaleMap {
    map: PolyMap,
    jac_inv: PolyMatrix,
}

impl EtaleMap {
    pub fn new(map: PolyMap, jac_inv: PolyMatrix) -> Result<Self> {
        let n = map.len();
        if map.iter().any(|p| p.nvars() != n) || jac_inv.rows() != n || jac_inv.cols() != n || jac_inv.nvars() != n {
            return Err(Error::Shape("étale map must be square".into()));
        }
        if !jacobian(&map, n).mul(&jac_inv).is_identity() {
            return Err(Error::BadInverse("J·J⁻¹ ≠ id".into()));
        }
        Ok(EtaleMap { map, jac_inv })
    }

    /// The inverse Jacobian computed over the polynomial ring.
    pub fn from_map(map: PolyMap) -> Result<Self> {
        let n = map.len();
        let j = jacobian(&map, n);
        let jac_inv = j.inverse()?;
        Self::new(map, jac_inv)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(identity_map(n), PolyMatrix::identity(n, n)).expect("identity")
    }

    pub fn from_split(f: &SplitSubmersion) -> Result<Self> {
        if f.fiber_dim() != 0 {
            return Err(Error::Shape("a split submersion with fibres is not étale".into()));
        }
        Self::from_map(f.map())
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[Poly] {
        &self.map
    }

    pub fn jac_inv(&self) -> &PolyMatrix {
        &self.jac_inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    fn shear() -> SplitSubmersion {
        // Φ(x, y) = (x + y², y)
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        SplitSubmersion::new(1, vec![&x + &y.pow(2), y.clone()], vec![&x - &y.pow(2), y]).unwrap()
    }

    #[test]
    fn inverse_is_checked() {
        let x = Poly::var(1, 0);
        assert!(SplitSubmersion::new(1, vec![x.scale(&int(2))], vec![x]).is_err());
    }

    #[test]
    fn vertical_frame_is_killed_by_f() {
        let f = shear();
        let v = f.vertical(0);
        assert_eq!(push_vector(v, &f.map()), vec![Poly::zero(2)]);
        assert_eq!(v[0], Poly::var(2, 1).scale(&int(-2)));
    }

    #[test]
    fn composition_is_a_split_submersion() {
        let f = SplitSubmersion::projection(2, 1);
        let g = shear();
        let h = f.then(&g).unwrap();
        assert_eq!(h.source_dim(), 3);
        assert_eq!(h.fiber_dim(), 2);
        assert_eq!(h.map(), compose_maps(&g.map(), &f.map(), 3));
    }

    #[test]
    fn etale_jacobian() {
        let x = Poly::var(1, 0);
        let e = EtaleMap::from_map(vec![x.scale(&int(2))]).unwrap();
        assert_eq!(e.jac_inv().get(0, 0), &Poly::constant(1, crate::exactalg::rat(1, 2)));
    }
}
