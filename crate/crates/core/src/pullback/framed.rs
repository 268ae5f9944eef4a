use super::submersion::{compose_maps, identity_map, PolyMap, SplitSubmersion};
use crate::algebroid::{apply_vector, lie_bracket, pull, AlgebroidPresentation, MorphismData};
use crate::exactalg::{Poly, PolyMatrix};
use crate::{Error, Result};

/// A section of `TZ ⊕ A` along maps into the source chart and into the base
/// of `A`: the vector part is written along the source coordinates, the
/// coefficients along the frame of `A`. All entries are functions on `Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub vector: Vec<Poly>,
    pub coeffs: Vec<Poly>,
}

impl Pair {
    pub fn nvars(&self) -> usize {
        self.vector.iter().chain(&self.coeffs).map(Poly::nvars).next().unwrap_or(0)
    }

    pub fn substitute(&self, along: &[Poly], nvars: usize) -> Pair {
        Pair {
            vector: compose_maps(&self.vector, along, nvars),
            coeffs: compose_maps(&self.coeffs, along, nvars),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum FrameKind {
    /// Frame `(∂/∂u_{n+1}, …, ∂/∂u_{n+k}, lifts of e_1, …, e_r)`.
    Split(SplitSubmersion),
    /// Frame indexed by the non-pivot columns of the transversality matrix.
    Kernel { free: Vec<usize> },
}

/// A pullback algebroid `f!A ⊂ TX ⊕ f*A` together with the pair description
/// of its frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackAlgebroid {
    map: PolyMap,
    source_dim: usize,
    inner: AlgebroidPresentation,
    frame: Vec<Pair>,
    kind: FrameKind,
    presentation: AlgebroidPresentation,
}

/// `Σ_ν v_ν (∂_ν map_μ)∘along`: pushforward of a vector sitting at `along(z)`.
fn push_along(v: &[Poly], map: &[Poly], along: &[Poly], nvars: usize) -> Vec<Poly> {
    map.iter()
        .map(|m| {
            let mut acc = Poly::zero(nvars);
            for (nu, vn) in v.iter().enumerate() {
                if vn.is_zero() {
                    continue;
                }
                let d = m.derive(nu);
                if !d.is_zero() {
                    acc = acc + vn * &pull(&d, along, nvars);
                }
            }
            acc
        })
        .collect()
}

impl PullbackAlgebroid {
    /// `f!A` for a split submersion.
    pub fn along_submersion(f: &SplitSubmersion, a: &AlgebroidPresentation) -> Result<Self> {
        if a.dim() != f.target_dim() {
            return Err(Error::Shape(format!(
                "algebroid over Affine({}) pulled back along a map into Affine({})",
                a.dim(),
                f.target_dim()
            )));
        }
        let total = f.source_dim();
        let map = f.map();
        let r = a.rank();
        let mut frame = Vec::with_capacity(r + f.fiber_dim());
        for j in 0..f.fiber_dim() {
            frame.push(Pair { vector: f.vertical(j).to_vec(), coeffs: vec![Poly::zero(total); r] });
        }
        for i in 0..r {
            let w: Vec<Poly> = a.anchor_of(i).iter().map(|p| pull(p, &map, total)).collect();
            let coeffs = (0..r).map(|c| if c == i { Poly::one(total) } else { Poly::zero(total) }).collect();
            frame.push(Pair { vector: f.horizontal_lift(&w), coeffs });
        }
        Self::assemble(map, total, a.clone(), frame, FrameKind::Split(f.clone()))
    }

    /// `σ!A` for a map `σ: Y → X` transverse to the anchor, with `complement`
    /// a split submersion satisfying `complement ∘ σ = id`. The frame is a
    /// kernel basis obtained by elimination on constant pivots.
    pub fn transverse(sigma: &[Poly], complement: &SplitSubmersion, a: &AlgebroidPresentation) -> Result<Self> {
        let (n_x, m) = (complement.source_dim(), complement.target_dim());
        if a.dim() != n_x || sigma.len() != n_x || sigma.iter().any(|p| p.nvars() != m) {
            return Err(Error::Shape("transverse pullback: chart mismatch".into()));
        }
        if !complement.is_section(sigma) {
            return Err(Error::Invalid("the map is not a section of the complement".into()));
        }
        let r = a.rank();
        let phi = complement.forward();
        let k = n_x - m;
        // images of the anchor at σ(y), in u-coordinates
        let u_of: Vec<Vec<Poly>> = (0..r)
            .map(|i| phi.iter().map(|p| pull(&apply_vector(a.anchor_of(i), p), sigma, m)).collect())
            .collect();
        let sigma_u: Vec<Poly> = phi[m..].iter().map(|p| pull(p, sigma, m)).collect();
        let mut kmat = PolyMatrix::zeros(k, r, m);
        for j in 0..k {
            for i in 0..r {
                let mut e = u_of[i][m + j].clone();
                for mu in 0..m {
                    e = e - &u_of[i][mu] * &sigma_u[j].derive(mu);
                }
                kmat.set(j, i, e);
            }
        }
        let kernel = kmat.constant_pivot_kernel()?;
        if kernel.zero_rows > 0 {
            return Err(Error::Invalid("map is not transverse to the anchor".into()));
        }
        let free = kernel.free.clone();
        let mut frame = Vec::with_capacity(free.len());
        for kappa in kernel.basis {
            let mut vector = vec![Poly::zero(m); m];
            for (i, ki) in kappa.iter().enumerate() {
                if ki.is_zero() {
                    continue;
                }
                for mu in 0..m {
                    vector[mu] = &vector[mu] + &(ki * &u_of[i][mu]);
                }
            }
            frame.push(Pair { vector, coeffs: kappa });
        }
        let out = Self::assemble(sigma.to_vec(), m, a.clone(), frame, FrameKind::Kernel { free })?;
        let id = identity_map(m);
        for (l, p) in out.frame.iter().enumerate() {
            if !out.is_element(p, &id) {
                return Err(Error::Inconsistent(format!("kernel frame element {} is not in the pullback", l + 1)));
            }
        }
        Ok(out)
    }

    fn assemble(
        map: PolyMap,
        source_dim: usize,
        inner: AlgebroidPresentation,
        frame: Vec<Pair>,
        kind: FrameKind,
    ) -> Result<Self> {
        let rank = frame.len();
        let anchor = PolyMatrix::from_rows(source_dim, frame.iter().map(|p| p.vector.clone()).collect());
        let placeholder = AlgebroidPresentation::abelian(source_dim, rank);
        let mut out = PullbackAlgebroid { map, source_dim, inner, frame, kind, presentation: placeholder };
        let mut structure = vec![Poly::zero(source_dim); rank * rank * rank];
        for i in 0..rank {
            for j in i + 1..rank {
                let br = out.bracket(&out.frame[i], &out.frame[j]);
                let c = out.decompose(&br)?;
                for (k, ck) in c.into_iter().enumerate() {
                    structure[(j * rank + i) * rank + k] = -&ck;
                    structure[(i * rank + j) * rank + k] = ck;
                }
            }
        }
        out.presentation = AlgebroidPresentation::from_structure(source_dim, rank, anchor, structure)?;
        Ok(out)
    }

    pub fn presentation(&self) -> &AlgebroidPresentation {
        &self.presentation
    }

    pub fn inner(&self) -> &AlgebroidPresentation {
        &self.inner
    }

    /// The underlying base map, in source variables.
    pub fn map(&self) -> &[Poly] {
        &self.map
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn frame(&self) -> &[Pair] {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    pub fn submersion(&self) -> Option<&SplitSubmersion> {
        match &self.kind {
            FrameKind::Split(f) => Some(f),
            FrameKind::Kernel { .. } => None,
        }
    }

    /// Whether a pair along `along: Z → X` satisfies `f_* v = a(w)`.
    pub fn is_element(&self, p: &Pair, along: &[Poly]) -> bool {
        let z = along.first().map(Poly::nvars).unwrap_or_else(|| p.nvars());
        let lhs = push_along(&p.vector, &self.map, along, z);
        let base = compose_maps(&self.map, along, z);
        let mut rhs = vec![Poly::zero(z); self.inner.dim()];
        for (i, w) in p.coeffs.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (mu, a) in self.inner.anchor_of(i).iter().enumerate() {
                rhs[mu] = &rhs[mu] + &(w * &pull(a, &base, z));
            }
        }
        lhs == rhs
    }

    /// `Σ_l c_l · frame_l∘along`.
    pub fn combine_along(&self, c: &[Poly], along: &[Poly], nvars: usize) -> Pair {
        let mut out = Pair {
            vector: vec![Poly::zero(nvars); self.source_dim],
            coeffs: vec![Poly::zero(nvars); self.inner.rank()],
        };
        for (cl, fl) in c.iter().zip(&self.frame) {
            if cl.is_zero() {
                continue;
            }
            let fl = fl.substitute(along, nvars);
            for (o, x) in out.vector.iter_mut().zip(&fl.vector).chain(out.coeffs.iter_mut().zip(&fl.coeffs)) {
                if !x.is_zero() {
                    *o = &*o + &(cl * x);
                }
            }
        }
        out
    }

    /// Frame coefficients of a pair along `along: Z → X`. Fails when the
    /// pair is not a section of the pullback.
    pub fn decompose_along(&self, p: &Pair, along: &[Poly]) -> Result<Vec<Poly>> {
        let z = p.nvars();
        if p.vector.len() != self.source_dim || p.coeffs.len() != self.inner.rank() {
            return Err(Error::Shape("pair does not match the pullback".into()));
        }
        let c: Vec<Poly> = match &self.kind {
            FrameKind::Split(f) => {
                let vert = &f.forward()[f.target_dim()..];
                let mut c = push_along(&p.vector, vert, along, z);
                c.extend(p.coeffs.iter().cloned());
                c
            }
            FrameKind::Kernel { free } => free.iter().map(|&l| p.coeffs[l].clone()).collect(),
        };
        if self.combine_along(&c, along, z) != *p {
            return Err(Error::Invalid("pair is not a section of the pullback algebroid".into()));
        }
        Ok(c)
    }

    pub fn decompose(&self, p: &Pair) -> Result<Vec<Poly>> {
        self.decompose_along(p, &identity_map(self.source_dim))
    }

    /// `[(v,w),(v',w')] = ([v,v'], Σ w_i w'_j c_{ij}∘f + v(w') − v'(w))` over the source chart.
    pub fn bracket(&self, p: &Pair, q: &Pair) -> Pair {
        let n = self.source_dim;
        let r = self.inner.rank();
        let mut coeffs = vec![Poly::zero(n); r];
        for i in 0..r {
            if p.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if q.coeffs[j].is_zero() || i == j {
                    continue;
                }
                let ww = &p.coeffs[i] * &q.coeffs[j];
                for (k, o) in coeffs.iter_mut().enumerate() {
                    let c = self.inner.c(i, j, k);
                    if !c.is_zero() {
                        *o = &*o + &(&ww * &pull(c, &self.map, n));
                    }
                }
            }
        }
        for k in 0..r {
            coeffs[k] = &coeffs[k] + &apply_vector(&p.vector, &q.coeffs[k]) - apply_vector(&q.vector, &p.coeffs[k]);
        }
        Pair { vector: lie_bracket(&p.vector, &q.vector), coeffs }
    }

    /// The projection `f!A → A` covering `f`.
    pub fn projection(&self) -> Result<MorphismData> {
        let rows = self.frame.iter().map(|p| p.coeffs.clone()).collect();
        MorphismData::new(
            self.presentation.clone(),
            self.inner.clone(),
            self.map.clone(),
            PolyMatrix::from_rows(self.source_dim, rows),
        )
    }

    /// Frame matrix of a pair-level map into another pullback over the same chart.
    pub fn map_pairs(&self, target: &PullbackAlgebroid, f: impl Fn(&Pair) -> Result<Pair>) -> Result<PolyMatrix> {
        if target.source_dim != self.source_dim {
            return Err(Error::Shape("pullbacks over different charts".into()));
        }
        let rows = self.frame.iter().map(|p| target.decompose(&f(p)?)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix::from_rows(self.source_dim, rows))
    }

    /// The identity of `TX ⊕ f*A` between two presentations of the same
    /// pullback (equal maps and inner algebroid, different splittings).
    pub fn identification(&self, target: &PullbackAlgebroid) -> Result<MorphismData> {
        if self.map != target.map || self.inner != target.inner {
            return Err(Error::Invalid("pullbacks along different maps".into()));
        }
        let m = self.map_pairs(target, |p| Ok(p.clone()))?;
        MorphismData::over_identity(self.presentation.clone(), target.presentation.clone(), m)
    }

    /// `f!ρ` for a base-preserving `ρ: A → B`, with `target = f!B` along the same map.
    pub fn pull_morphism(&self, rho: &MorphismData, target: &PullbackAlgebroid) -> Result<MorphismData> {
        if !rho.covers_identity() || rho.source != self.inner || rho.target != target.inner {
            return Err(Error::Shape("f!ρ needs a base-preserving ρ between the inner algebroids".into()));
        }
        if self.map != target.map {
            return Err(Error::Invalid("pullbacks along different maps".into()));
        }
        let n = self.source_dim;
        let m = rho.matrix.substitute_or_constant(&self.map, n);
        let mat = self.map_pairs(target, |p| {
            let coeffs = (0..m.cols())
                .map(|b| {
                    let mut acc = Poly::zero(n);
                    for (a, w) in p.coeffs.iter().enumerate() {
                        if !w.is_zero() {
                            acc = acc + w * m.get(a, b);
                        }
                    }
                    acc
                })
                .collect();
            Ok(Pair { vector: p.vector.clone(), coeffs })
        })?;
        MorphismData::over_identity(self.presentation.clone(), target.presentation.clone(), mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{check_morphism, trivial_transitive, verify_algebroid};
    use crate::exactalg::int;

    fn sl2() -> AlgebroidPresentation {
        AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (2, 0, 1, int(1))]).unwrap()
    }

    #[test]
    fn identity_pullback_is_the_algebroid() {
        let x = Poly::var(1, 0);
        let a = crate::algebroid::rank1_from_anchor(vec![x.pow(2)]).unwrap();
        let p = PullbackAlgebroid::along_submersion(&SplitSubmersion::identity(1), &a).unwrap();
        assert_eq!(p.presentation(), &a);
    }

    #[test]
    fn projection_pulls_tangent_to_tangent() {
        let f = SplitSubmersion::projection(1, 1);
        let p = PullbackAlgebroid::along_submersion(&f, &AlgebroidPresentation::tangent(1)).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.presentation().permute_frame(&[1, 0]).unwrap(), AlgebroidPresentation::tangent(2));
    }

    #[test]
    fn lie_algebra_over_the_plane_is_trivial_transitive() {
        let f = SplitSubmersion::projection(0, 2);
        let p = PullbackAlgebroid::along_submersion(&f, &sl2()).unwrap();
        assert_eq!(p.presentation(), &trivial_transitive(&sl2(), 2).unwrap());
    }

    #[test]
    fn nonlinear_split_gives_valid_algebroid() {
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        let f = SplitSubmersion::new(1, vec![&x + &y.pow(2), y.clone()], vec![&x - &y.pow(2), y]).unwrap();
        let a = crate::algebroid::rank1_from_anchor(vec![Poly::var(1, 0)]).unwrap();
        let p = PullbackAlgebroid::along_submersion(&f, &a).unwrap();
        assert!(verify_algebroid(p.presentation()).is_valid());
        assert!(check_morphism(&p.projection().unwrap()).is_valid());
    }

    #[test]
    fn transverse_pullback_along_a_section_of_the_tangent_bundle() {
        // σ(y) = (y, 0) into the plane, A = T(plane): σ!A = T(line).
        let y = Poly::var(1, 0);
        let f = SplitSubmersion::projection(1, 1);
        let t = PullbackAlgebroid::transverse(&[y, Poly::zero(1)], &f, &AlgebroidPresentation::tangent(2)).unwrap();
        assert_eq!(t.presentation(), &AlgebroidPresentation::tangent(1));
    }

    #[test]
    fn non_transverse_is_rejected() {
        let y = Poly::var(1, 0);
        let f = SplitSubmersion::projection(1, 1);
        let a = AlgebroidPresentation::abelian(2, 1);
        assert!(PullbackAlgebroid::transverse(&[y, Poly::zero(1)], &f, &a).is_err());
    }
}
