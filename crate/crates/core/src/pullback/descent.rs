use super::composition::composition_iso;
use super::framed::{Pair, PullbackAlgebroid};
use super::submersion::{push_vector, EtaleMap, SplitSubmersion};
use super::etale::etale_pullback;
use crate::algebroid::{check_morphism, pull, AlgebroidPresentation, MorphismData};
use crate::exactalg::{Poly, PolyMatrix, RatMatrix, Rational};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

/// `x ↦ Mx + b` on `Affine(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub matrix: RatMatrix,
    pub offset: Vec<Rational>,
}

impl AffineMap {
    pub fn new(matrix: RatMatrix, offset: Vec<Rational>) -> Result<Self> {
        if matrix.rows() != matrix.cols() || offset.len() != matrix.rows() {
            return Err(Error::Shape("affine map must be square with matching offset".into()));
        }
        Ok(AffineMap { matrix, offset })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap { matrix: RatMatrix::identity(n), offset: vec![Rational::from_integer(0.into()); n] }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn images(&self) -> Vec<Poly> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut p = Poly::constant(n, self.offset[i].clone());
                for j in 0..n {
                    p = p + Poly::var(n, j).scale(self.matrix.get(i, j));
                }
                p
            })
            .collect()
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &AffineMap) -> Result<AffineMap> {
        let matrix = after.matrix.mul(&self.matrix)?;
        let shifted = after.matrix.apply(&self.offset);
        let offset = shifted.iter().zip(&after.offset).map(|(a, b)| a + b).collect();
        AffineMap::new(matrix, offset)
    }

    pub fn etale(&self) -> Result<EtaleMap> {
        let n = self.dim();
        EtaleMap::new(self.images(), PolyMatrix::from_constants(&self.matrix.inverse()?, n))
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix.apply(x).iter().zip(&self.offset).map(|(a, b)| a + b).collect()
    }
}

/// Transition data on `U_i ∩ U_j`: `θ_ij: A_j| → A_i|` and `θ_ji: A_i| → A_j|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub i: usize,
    pub j: usize,
    pub into_i: AffineMap,
    pub into_j: AffineMap,
    pub theta_ij: PolyMatrix,
    pub theta_ji: PolyMatrix,
}

/// `U_i ∩ U_j ∩ U_k` with inclusions into the pairwise overlaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleOverlap {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub into_ij: AffineMap,
    pub into_jk: AffineMap,
    pub into_ik: AffineMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDatum {
    pub charts: Vec<AlgebroidPresentation>,
    pub overlaps: Vec<Overlap>,
    pub triples: Vec<TripleOverlap>,
}

/// `ψ: s!A → t!A` over `X ×_Y X`, realized as `Affine(n+2k)` with coordinates `(u, w, w′)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmersionDatum {
    pub map: SplitSubmersion,
    pub algebroid: AlgebroidPresentation,
    pub psi: PolyMatrix,
}

/// Outcome of a descent check; `certificate` lists each identity verified.
#[derive(Clone, Debug, PartialEq)]
pub struct DescentReport {
    pub verdict: Verdict,
    pub certificate: Vec<String>,
}

/// The glued object as an atlas: charts, transitions and the normalizing
/// isomorphisms `ψ_i: A|_{U_i} → A_i`, which are identities in chart frames.
#[derive(Clone, Debug, PartialEq)]
pub struct GluedAtlas {
    pub charts: Vec<AlgebroidPresentation>,
    pub transitions: Vec<((usize, usize), PolyMatrix)>,
    pub normalizers: Vec<PolyMatrix>,
}

fn relabel(v: Verdict, prefix: &str) -> Verdict {
    match v {
        Verdict::Valid => Verdict::Valid,
        Verdict::Invalid(w) => Verdict::Invalid(Witness::new(format!("{prefix}: {}", w.location), w.residue)),
    }
}

fn matrix_difference(lhs: &PolyMatrix, rhs: &PolyMatrix, what: &str) -> Verdict {
    match lhs.sub(rhs).first_nonzero() {
        None => Verdict::Valid,
        Some((r, c, p)) => Verdict::Invalid(Witness::new(format!("{what} at ({}, {})", r + 1, c + 1), p.clone())),
    }
}

impl CoverDatum {
    fn dim(&self) -> Result<usize> {
        let n = self.charts.first().map(AlgebroidPresentation::dim).ok_or_else(|| Error::Shape("no charts".into()))?;
        if self.charts.iter().any(|a| a.dim() != n) {
            return Err(Error::Shape("charts of different dimension".into()));
        }
        Ok(n)
    }

    fn overlap(&self, a: usize, b: usize) -> Result<&Overlap> {
        let (i, j) = if a <= b { (a, b) } else { (b, a) };
        self.overlaps
            .iter()
            .find(|o| o.i == i && o.j == j)
            .ok_or_else(|| Error::Shape(format!("missing overlap U{}{}", i + 1, j + 1)))
    }

    /// `θ_ab` as stored, with the inclusion of its overlap into `U_a`.
    fn theta(&self, a: usize, b: usize) -> Result<(&PolyMatrix, &AffineMap)> {
        let o = self.overlap(a, b)?;
        Ok(if a == o.i { (&o.theta_ij, &o.into_i) } else { (&o.theta_ji, &o.into_j) })
    }

    fn glue(&self) -> GluedAtlas {
        let mut transitions = Vec::new();
        for o in &self.overlaps {
            transitions.push(((o.i, o.j), o.theta_ij.clone()));
            if o.i != o.j {
                transitions.push(((o.j, o.i), o.theta_ji.clone()));
            }
        }
        GluedAtlas {
            charts: self.charts.clone(),
            transitions,
            normalizers: self.charts.iter().map(|a| PolyMatrix::identity(a.rank(), a.dim())).collect(),
        }
    }
}

/// Checks a cover datum: each `θ` is a morphism of the restricted algebroids,
/// `θ_ij θ_ji = id` both ways, and `θ_ab θ_bc = θ_ac` on every triple overlap
/// for all orderings. Returns the glued atlas when valid.
pub fn verify_cover_descent(d: &CoverDatum) -> Result<(DescentReport, Option<GluedAtlas>)> {
    let n = d.dim()?;
    let mut cert = Vec::new();
    let done = |verdict: Verdict, cert: Vec<String>| Ok((DescentReport { verdict, certificate: cert }, None));
    for o in &d.overlaps {
        if o.i >= d.charts.len() || o.j >= d.charts.len() || o.i > o.j {
            return Err(Error::Shape(format!("overlap ({}, {}) must list chart indices in order", o.i + 1, o.j + 1)));
        }
        let (ai, aj) = (&d.charts[o.i], &d.charts[o.j]);
        if o.into_i.dim() != n || o.into_j.dim() != n {
            return Err(Error::Shape("overlap inclusions must be maps of Affine(n)".into()));
        }
        let ri = etale_pullback(&o.into_i.etale()?, ai)?;
        let rj = etale_pullback(&o.into_j.etale()?, aj)?;
        let (i1, j1) = (o.i + 1, o.j + 1);
        let tij = MorphismData::over_identity(rj.clone(), ri.clone(), o.theta_ij.clone())?;
        let tji = MorphismData::over_identity(ri, rj, o.theta_ji.clone())?;
        for (m, name) in [(&tij, format!("θ{i1}{j1}")), (&tji, format!("θ{j1}{i1}"))] {
            let v = relabel(check_morphism(m), &name);
            if !v.is_valid() {
                return done(v, cert);
            }
            cert.push(format!("{name} is a morphism of the restricted algebroids"));
        }
        let r = ai.rank();
        let id = PolyMatrix::identity(r, n);
        let v = matrix_difference(&o.theta_ji.mul(&o.theta_ij), &id, &format!("θ{i1}{j1}∘θ{j1}{i1} − id"))
            .and_then(|| matrix_difference(&o.theta_ij.mul(&o.theta_ji), &id, &format!("θ{j1}{i1}∘θ{i1}{j1} − id")));
        if !v.is_valid() {
            return done(v, cert);
        }
        cert.push(format!("θ{i1}{j1}∘θ{j1}{i1} = id and θ{j1}{i1}∘θ{i1}{j1} = id"));
        if o.i == o.j {
            let v = matrix_difference(&o.theta_ij, &id, &format!("θ{i1}{i1} − id"));
            if !v.is_valid() {
                return done(v, cert);
            }
        }
    }
    for t in &d.triples {
        let idx = [t.i, t.j, t.k];
        let pair_map = |a: usize, b: usize| -> Result<&AffineMap> {
            match (a.min(b), a.max(b)) {
                (x, y) if (x, y) == (t.i.min(t.j), t.i.max(t.j)) => Ok(&t.into_ij),
                (x, y) if (x, y) == (t.j.min(t.k), t.j.max(t.k)) => Ok(&t.into_jk),
                (x, y) if (x, y) == (t.i.min(t.k), t.i.max(t.k)) => Ok(&t.into_ik),
                _ => Err(Error::Shape("triple overlap does not contain this pair".into())),
            }
        };
        // inclusions into each chart must agree
        for &c in &idx {
            let mut routes = Vec::new();
            for &other in idx.iter().filter(|&&o| o != c) {
                let (_, into_c) = d.theta(c, other)?;
                routes.push(pair_map(c, other)?.then(into_c)?);
            }
            if routes.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::Inconsistent(format!(
                    "triple overlap U{}{}{} includes into U{} in two different ways",
                    t.i + 1,
                    t.j + 1,
                    t.k + 1,
                    c + 1
                )));
            }
        }
        let restricted = |a: usize, b: usize| -> Result<PolyMatrix> {
            let (m, _) = d.theta(a, b)?;
            Ok(m.substitute_or_constant(&pair_map(a, b)?.images(), n))
        };
        for (a, b, c) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
            let (a, b, c) = (idx[a], idx[b], idx[c]);
            let lhs = restricted(b, c)?.mul(&restricted(a, b)?);
            let rhs = restricted(a, c)?;
            let what = format!("θ{}{}∘θ{}{} − θ{}{}", a + 1, b + 1, b + 1, c + 1, a + 1, c + 1);
            let v = matrix_difference(&lhs, &rhs, &what);
            if !v.is_valid() {
                return done(v, cert);
            }
        }
        cert.push(format!("cocycle on U{}{}{} for all orderings", t.i + 1, t.j + 1, t.k + 1));
    }
    let atlas = d.glue();
    for ((a, b), m) in &atlas.transitions {
        // ψ_a⁻¹ ψ_b = θ_ab with identity normalizers
        let lhs = atlas.normalizers[*b].substitute_or_constant(&d.theta(*a, *b)?.1.images(), n).mul(m);
        if lhs != *m {
            return Err(Error::Inconsistent("normalizers do not reproduce the transitions".into()));
        }
    }
    cert.push("normalizing isomorphisms ψ_i satisfy ψ_i⁻¹ψ_j = θ_ij".into());
    Ok((DescentReport { verdict: Verdict::Valid, certificate: cert }, Some(atlas)))
}

fn permutation_split(target_dim: usize, perm: &[usize]) -> SplitSubmersion {
    let n = perm.len();
    let forward: Vec<Poly> = perm.iter().map(|&p| Poly::var(n, p)).collect();
    let mut inverse = vec![Poly::zero(n); n];
    for (i, &p) in perm.iter().enumerate() {
        inverse[p] = Poly::var(n, i);
    }
    SplitSubmersion::new(target_dim, forward, inverse).expect("permutation")
}

/// The groupoid `X ×_Y X ⇉ X` of a split submersion and its composable pairs.
///
/// `P = Affine(n+2k)` has coordinates `(u, w, w′)` with `s = Φ⁻¹(u, w)` and
/// `t = Φ⁻¹(u, w′)`. `P₂ = Affine(n+3k)` has `(u, w₁, w₂, w₃)`, where `pr₂`
/// forgets `w₃`, `pr₁` forgets `w₁` and `m` forgets `w₂`.
#[derive(Clone, Debug)]
pub struct FibreProducts {
    pub s: SplitSubmersion,
    pub t: SplitSubmersion,
    pub pr1: SplitSubmersion,
    pub pr2: SplitSubmersion,
    pub m: SplitSubmersion,
}

pub fn fibre_products(f: &SplitSubmersion) -> Result<FibreProducts> {
    let (n, k) = (f.target_dim(), f.fiber_dim());
    let total = n + 2 * k;
    let vars = |r: std::ops::Range<usize>| -> Vec<Poly> { r.map(|i| Poly::var(total, i)).collect() };
    let (u, w, w2) = (vars(0..n), vars(n..n + k), vars(n + k..total));
    let inv_at = |tail: &[Poly]| -> Vec<Poly> {
        let args: Vec<Poly> = u.iter().chain(tail).cloned().collect();
        f.inverse().iter().map(|p| p.substitute(&args)).collect()
    };
    let phi_x: Vec<Poly> = f.forward().iter().map(|p| p.embed(total, 0)).collect();
    // s: (u, w, w′) ↦ (Φ⁻¹(u, w), w′)
    let mut s_fwd = inv_at(&w);
    s_fwd.extend(w2.iter().cloned());
    let mut s_inv = phi_x.clone();
    s_inv.extend(w2.iter().cloned());
    // t: (u, w, w′) ↦ (Φ⁻¹(u, w′), w); inverse (x, a) ↦ (Φ(x)_u, a, Φ(x)_w)
    let mut t_fwd = inv_at(&w2);
    t_fwd.extend(w.iter().cloned());
    let mut t_inv: Vec<Poly> = phi_x[..n].to_vec();
    t_inv.extend(w2.iter().cloned());
    t_inv.extend(phi_x[n..].iter().cloned());
    let s = SplitSubmersion::new(n + k, s_fwd, s_inv)?;
    let t = SplitSubmersion::new(n + k, t_fwd, t_inv)?;
    let block = |b: usize| -> Vec<usize> { (n + b * k..n + (b + 1) * k).collect() };
    let perm = |order: [usize; 3]| -> Vec<usize> {
        (0..n).chain(order.iter().flat_map(|&b| block(b))).collect()
    };
    Ok(FibreProducts {
        s,
        t,
        pr1: permutation_split(total, &perm([1, 2, 0])),
        pr2: permutation_split(total, &perm([0, 1, 2])),
        m: permutation_split(total, &perm([0, 2, 1])),
    })
}

/// `ψ` transported along `j: Z → P`: an element `(v, w)` of `TZ ⊕ A` over
/// `s∘j` goes to the coefficients of its image over `t∘j`.
fn transport(
    s_a: &PullbackAlgebroid,
    t_a: &PullbackAlgebroid,
    psi: &PolyMatrix,
    along: &[Poly],
    v: &[Poly],
    w: &[Poly],
) -> Result<Vec<Poly>> {
    let z = along.first().map(Poly::nvars).unwrap_or(0);
    let down = Pair { vector: push_vector(v, along), coeffs: w.to_vec() };
    let c = s_a.decompose_along(&down, along)?;
    let p = psi.substitute_or_constant(along, z);
    let moved: Vec<Poly> = (0..p.cols())
        .map(|b| {
            let mut acc = Poly::zero(z);
            for (a, ca) in c.iter().enumerate() {
                if !ca.is_zero() {
                    acc = acc + ca * p.get(a, b);
                }
            }
            acc
        })
        .collect();
    let up = t_a.combine_along(&moved, along, z);
    if up.vector != down.vector {
        return Err(Error::Invalid("ψ does not cover the identity on vectors".into()));
    }
    Ok(up.coeffs)
}

impl SubmersionDatum {
    pub fn new(map: SplitSubmersion, algebroid: AlgebroidPresentation, psi: PolyMatrix) -> Result<Self> {
        if algebroid.dim() != map.source_dim() {
            return Err(Error::Shape("algebroid must live on the source of the submersion".into()));
        }
        let r = algebroid.rank() + map.fiber_dim();
        let p = map.target_dim() + 2 * map.fiber_dim();
        if psi.rows() != r || psi.cols() != r || psi.nvars() != p {
            return Err(Error::Shape(format!("ψ must be {r}x{r} over Affine({p})")));
        }
        Ok(SubmersionDatum { map, algebroid, psi })
    }

    /// `A = φ!B` with `ψ = c_{φ,t} ∘ (φs = φt) ∘ c_{φ,s}⁻¹`.
    pub fn canonical(map: &SplitSubmersion, b: &AlgebroidPresentation) -> Result<Self> {
        let a = PullbackAlgebroid::along_submersion(map, b)?;
        let fp = fibre_products(map)?;
        let psi = canonical_psi(&fp, map, b)?;
        Self::new(map.clone(), a.presentation().clone(), psi)
    }

    /// Transfers the datum to the frame `e′_i = Σ_j G_ij e_j`.
    pub fn regauge(&self, g: &PolyMatrix, g_inv: &PolyMatrix) -> Result<Self> {
        let a2 = self.algebroid.change_frame(g, g_inv)?;
        let fp = fibre_products(&self.map)?;
        let to_old = MorphismData::over_identity(a2.clone(), self.algebroid.clone(), g.clone())?;
        let to_new = MorphismData::over_identity(self.algebroid.clone(), a2.clone(), g_inv.clone())?;
        let s_new = PullbackAlgebroid::along_submersion(&fp.s, &a2)?;
        let s_old = PullbackAlgebroid::along_submersion(&fp.s, &self.algebroid)?;
        let t_old = PullbackAlgebroid::along_submersion(&fp.t, &self.algebroid)?;
        let t_new = PullbackAlgebroid::along_submersion(&fp.t, &a2)?;
        let sg = s_new.pull_morphism(&to_old, &s_old)?;
        let tg = t_old.pull_morphism(&to_new, &t_new)?;
        let psi = sg.matrix.mul(&self.psi).mul(&tg.matrix);
        Self::new(self.map.clone(), a2, psi)
    }
}

fn canonical_psi(fp: &FibreProducts, map: &SplitSubmersion, b: &AlgebroidPresentation) -> Result<PolyMatrix> {
    let cs = composition_iso(&fp.s, map, b)?;
    let ct = composition_iso(&fp.t, map, b)?;
    let iota = cs.composite.identification(&ct.composite)?;
    Ok(cs.inverse.matrix.mul(&iota.matrix).mul(&ct.iso.matrix))
}

/// Checks `ψ` is an isomorphism of algebroids `s!A → t!A` and the cocycle
/// condition, both in full form with the composition isomorphisms and as the
/// action law `ψ̃(m_*(v,w), ξ) = ψ̃(v, ψ̃(w, ξ))`. The two routes must agree.
pub fn verify_submersion_descent(d: &SubmersionDatum) -> Result<DescentReport> {
    let fp = fibre_products(&d.map)?;
    let a = &d.algebroid;
    let s_a = PullbackAlgebroid::along_submersion(&fp.s, a)?;
    let t_a = PullbackAlgebroid::along_submersion(&fp.t, a)?;
    let psi = MorphismData::over_identity(s_a.presentation().clone(), t_a.presentation().clone(), d.psi.clone())?;
    let mut cert = Vec::new();
    let v = relabel(check_morphism(&psi), "ψ");
    if !v.is_valid() {
        return Ok(DescentReport { verdict: v, certificate: cert });
    }
    cert.push("ψ: s!A → t!A is a morphism".into());
    if d.psi.inverse().is_err() {
        return Ok(DescentReport {
            verdict: Verdict::Invalid(Witness::new("det ψ is not a unit", d.psi.det())),
            certificate: cert,
        });
    }
    cert.push("ψ is invertible".into());

    let c_s_pr2 = composition_iso(&fp.pr2, &fp.s, a)?;
    let c_s_m = composition_iso(&fp.m, &fp.s, a)?;
    let c_t_m = composition_iso(&fp.m, &fp.t, a)?;
    let c_t_pr1 = composition_iso(&fp.pr1, &fp.t, a)?;
    let c_t_pr2 = composition_iso(&fp.pr2, &fp.t, a)?;
    let c_s_pr1 = composition_iso(&fp.pr1, &fp.s, a)?;
    let iota1 = c_s_pr2.composite.identification(&c_s_m.composite)?;
    let iota2 = c_t_m.composite.identification(&c_t_pr1.composite)?;
    let iota3 = c_t_pr2.composite.identification(&c_s_pr1.composite)?;
    let m_psi = c_s_m.nested.pull_morphism(&psi, &c_t_m.nested)?;
    let pr2_psi = c_s_pr2.nested.pull_morphism(&psi, &c_t_pr2.nested)?;
    let pr1_psi = c_s_pr1.nested.pull_morphism(&psi, &c_t_pr1.nested)?;
    let lhs = [
        &c_s_pr2.inverse.matrix,
        &iota1.matrix,
        &c_s_m.iso.matrix,
        &m_psi.matrix,
        &c_t_m.inverse.matrix,
        &iota2.matrix,
        &c_t_pr1.iso.matrix,
    ]
    .into_iter()
    .skip(1)
    .fold(c_s_pr2.inverse.matrix.clone(), |acc, m| acc.mul(m));
    let rhs = [&c_t_pr2.inverse.matrix, &iota3.matrix, &c_s_pr1.iso.matrix, &pr1_psi.matrix]
        .into_iter()
        .fold(pr2_psi.matrix.clone(), |acc, m| acc.mul(m));
    let full = matrix_difference(&lhs, &rhs, "cocycle (c_{t,pr1} c_{t,m}⁻¹ m!ψ c_{s,m} c_{s,pr2}⁻¹ − pr1!ψ c_{s,pr1} c_{t,pr2}⁻¹ pr2!ψ)");

    // action-law route on generators (v, e) of TP₂ ⊕ A over the first point
    let start = &c_s_pr2.composite;
    let mut action = Verdict::Valid;
    'outer: for (g, p) in start.frame().iter().enumerate() {
        let via_m = transport(&s_a, &t_a, &d.psi, fp.m.map().as_slice(), &p.vector, &p.coeffs)?;
        let w1 = transport(&s_a, &t_a, &d.psi, fp.pr2.map().as_slice(), &p.vector, &p.coeffs)?;
        let w2 = transport(&s_a, &t_a, &d.psi, fp.pr1.map().as_slice(), &p.vector, &w1)?;
        for (c, (l, r)) in via_m.iter().zip(&w2).enumerate() {
            let res = l - r;
            if !res.is_zero() {
                action = Verdict::Invalid(Witness::new(
                    format!("action law on generator {}, component {}", g + 1, c + 1),
                    res,
                ));
                break 'outer;
            }
        }
    }
    if full.is_valid() != action.is_valid() {
        return Err(Error::Inconsistent("full cocycle and action law disagree".into()));
    }
    if !full.is_valid() {
        return Ok(DescentReport { verdict: full, certificate: cert });
    }
    cert.push("cocycle with composition isomorphisms c_{s,pr2}, c_{s,m}, c_{t,m}, c_{t,pr1}, c_{t,pr2}, c_{s,pr1}".into());
    cert.push("action law ψ̃(m_*(v,w),ξ) = ψ̃(v,ψ̃(w,ξ)) on generators".into());
    Ok(DescentReport { verdict: Verdict::Valid, certificate: cert })
}

/// The result of descending along a section.
#[derive(Clone, Debug)]
pub struct Descended {
    /// `σ!A` over the target chart.
    pub algebroid: PullbackAlgebroid,
    /// `Σ: φ!σ!A → A`.
    pub sigma_iso: MorphismData,
    pub report: DescentReport,
}

/// Descends `(A, ψ)` along a section `σ` of the submersion, returning `σ!A`
/// and the isomorphism `Σ(v, ξ) = ψ̃(j_* v, ξ)` with `j = (σ∘φ, id): X → X ×_Y X`.
/// The report covers `Σ` being an isomorphism and the square `ψ ∘ s!Σ = t!Σ ∘ ψ̄`.
pub fn descend_along_section(d: &SubmersionDatum, sigma: &[Poly]) -> Result<Descended> {
    let f = &d.map;
    if !f.is_section(sigma) {
        return Err(Error::Invalid("s is not a section of φ".into()));
    }
    let (n, k) = (f.target_dim(), f.fiber_dim());
    let big = n + k;
    let fp = fibre_products(f)?;
    let a = &d.algebroid;
    let down = PullbackAlgebroid::transverse(sigma, f, a)?;
    let up = PullbackAlgebroid::along_submersion(f, down.presentation())?;
    let phi = f.forward();
    let sigma_phi: Vec<Poly> = sigma.iter().map(|p| pull(p, &f.map(), big)).collect();
    let mut j: Vec<Poly> = phi[..n].to_vec();
    j.extend(phi[n..].iter().map(|p| pull(p, &sigma_phi, big)));
    j.extend(phi[n..].iter().cloned());
    let s_a = PullbackAlgebroid::along_submersion(&fp.s, a)?;
    let t_a = PullbackAlgebroid::along_submersion(&fp.t, a)?;
    let rows = up
        .frame()
        .iter()
        .map(|p| {
            let w = down.combine_along(&p.coeffs, &f.map(), big).coeffs;
            transport(&s_a, &t_a, &d.psi, &j, &p.vector, &w)
        })
        .collect::<Result<Vec<_>>>()?;
    let sigma_iso = MorphismData::over_identity(up.presentation().clone(), a.clone(), PolyMatrix::from_rows(big, rows))?;
    let mut cert = vec![format!("σ!A built from a kernel frame of rank {}", down.rank())];
    let finish = |verdict: Verdict, cert: Vec<String>, down: PullbackAlgebroid, sigma_iso: MorphismData| {
        Ok(Descended { algebroid: down, sigma_iso, report: DescentReport { verdict, certificate: cert } })
    };
    let v = relabel(check_morphism(&sigma_iso), "Σ");
    if !v.is_valid() {
        return finish(v, cert, down, sigma_iso);
    }
    if sigma_iso.matrix.inverse().is_err() {
        let v = Verdict::Invalid(Witness::new("det Σ is not a unit", sigma_iso.matrix.det()));
        return finish(v, cert, down, sigma_iso);
    }
    cert.push("Σ: φ!σ!A → A is an isomorphism".into());
    let s_up = PullbackAlgebroid::along_submersion(&fp.s, up.presentation())?;
    let t_up = PullbackAlgebroid::along_submersion(&fp.t, up.presentation())?;
    let s_sigma = s_up.pull_morphism(&sigma_iso, &s_a)?;
    let t_sigma = t_up.pull_morphism(&sigma_iso, &t_a)?;
    let psi_bar = canonical_psi(&fp, f, down.presentation())?;
    let lhs = s_sigma.matrix.mul(&d.psi);
    let rhs = psi_bar.mul(&t_sigma.matrix);
    let v = matrix_difference(&lhs, &rhs, "descent square ψ∘s!Σ − t!Σ∘ψ̄");
    if v.is_valid() {
        cert.push("ψ∘s!Σ = t!Σ∘ψ̄".into());
    }
    finish(v, cert, down, sigma_iso)
}

/// `σ!φ!B ≅ B`: the map `(v, ξ) ↦ ξ` read in frames, checked to be an isomorphism.
pub fn roundtrip_bang(f: &SplitSubmersion, sigma: &[Poly], b: &AlgebroidPresentation) -> Result<(MorphismData, Verdict)> {
    if !f.is_section(sigma) {
        return Err(Error::Invalid("s is not a section of φ".into()));
    }
    let m = f.target_dim();
    let up = PullbackAlgebroid::along_submersion(f, b)?;
    let down = PullbackAlgebroid::transverse(sigma, f, up.presentation())?;
    let rows = down.frame().iter().map(|p| up.combine_along(&p.coeffs, sigma, m).coeffs).collect();
    let iso = MorphismData::over_identity(down.presentation().clone(), b.clone(), PolyMatrix::from_rows(m, rows))?;
    let mut v = check_morphism(&iso);
    if v.is_valid() && iso.matrix.inverse().is_err() {
        v = Verdict::Invalid(Witness::new("det of σ!φ!B → B is not a unit", iso.matrix.det()));
    }
    Ok((iso, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::rank1_from_anchor;
    use crate::exactalg::rat;

    fn line_cover(theta21: Rational) -> CoverDatum {
        CoverDatum {
            charts: vec![AlgebroidPresentation::abelian(1, 1); 2],
            overlaps: vec![Overlap {
                i: 0,
                j: 1,
                into_i: AffineMap::identity(1),
                into_j: AffineMap::identity(1),
                theta_ij: PolyMatrix::from_rows(1, vec![vec![Poly::from_int(1, 2)]]),
                theta_ji: PolyMatrix::from_rows(1, vec![vec![Poly::constant(1, theta21)]]),
            }],
            triples: vec![],
        }
    }

    #[test]
    fn two_chart_cover() {
        let (r, atlas) = verify_cover_descent(&line_cover(rat(1, 2))).unwrap();
        assert!(r.verdict.is_valid());
        assert_eq!(atlas.unwrap().transitions.len(), 2);
        let (r, _) = verify_cover_descent(&line_cover(rat(1, 3))).unwrap();
        let w = r.verdict.witness().unwrap();
        assert!(w.location.starts_with("θ12∘θ21 − id"));
        assert_eq!(w.residue, Poly::constant(1, rat(-1, 3)));
    }

    #[test]
    fn single_chart() {
        let d = CoverDatum {
            charts: vec![AlgebroidPresentation::tangent(1)],
            overlaps: vec![Overlap {
                i: 0,
                j: 0,
                into_i: AffineMap::identity(1),
                into_j: AffineMap::identity(1),
                theta_ij: PolyMatrix::identity(1, 1),
                theta_ji: PolyMatrix::identity(1, 1),
            }],
            triples: vec![],
        };
        assert!(verify_cover_descent(&d).unwrap().0.verdict.is_valid());
    }

    #[test]
    fn canonical_datum_descends_back() {
        let f = SplitSubmersion::projection(1, 1);
        let b = rank1_from_anchor(vec![Poly::var(1, 0)]).unwrap();
        let d = SubmersionDatum::canonical(&f, &b).unwrap();
        assert!(verify_submersion_descent(&d).unwrap().verdict.is_valid());
        let sigma = vec![Poly::var(1, 0), Poly::zero(1)];
        let out = descend_along_section(&d, &sigma).unwrap();
        assert!(out.report.verdict.is_valid(), "{:?}", out.report);
        let (_, v) = roundtrip_bang(&f, &sigma, &b).unwrap();
        assert!(v.is_valid());
    }

    #[test]
    fn twisted_datum() {
        let f = SplitSubmersion::projection(1, 1);
        let b = AlgebroidPresentation::abelian(1, 1);
        let d = SubmersionDatum::canonical(&f, &b).unwrap();
        let w = Poly::var(2, 1);
        let mut g = PolyMatrix::identity(2, 2);
        g.set(1, 0, w.clone());
        let mut gi = PolyMatrix::identity(2, 2);
        gi.set(1, 0, -&w);
        let twisted = d.regauge(&g, &gi).unwrap();
        assert_ne!(twisted.psi, d.psi);
        assert!(verify_submersion_descent(&twisted).unwrap().verdict.is_valid());
        let out = descend_along_section(&twisted, &[Poly::var(1, 0), Poly::from_int(1, 1)]).unwrap();
        assert!(out.report.verdict.is_valid(), "{:?}", out.report);
        let mut broken = twisted.clone();
        broken.psi.set(1, 1, Poly::from_int(3, 2));
        assert!(!verify_submersion_descent(&broken).unwrap().verdict.is_valid());
    }
}
