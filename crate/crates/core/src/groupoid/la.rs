use super::algebroid::{act_on_section, matrix_verdict, push_field, verify_groupoid_algebroid, GroupoidAlgebroid};
use super::group::{verify_groupoid, DeskGroupoid};
use crate::algebroid::{check_morphism, pull, verify_algebroid, AlgebroidPresentation, MorphismData};
use crate::exactalg::{Poly, PolyMatrix};
use crate::pullback::{Pair, PullbackAlgebroid, SplitSubmersion};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

/// A groupoid `Ω ⇉ A` of algebroids over `G ⋉ X ⇉ X`. `Ω` has one component
/// `omega[g]` per arrow chart. Structure maps are frame matrices in the row
/// convention:
/// `source[g]: Ω_g → A` over `x ↦ x`, `target[g]: Ω_g → A` over `l_g`,
/// `unit: A → Ω_e` over the identity, `inverse[g]: Ω_g → Ω_{g⁻¹}` over `l_g`,
/// and `multiplication[g][h]` sends a pair `(α, β) ∈ Ω_g × Ω_h`, stacked as
/// one row of length `rank Ω_g + rank Ω_h`, to `Ω_{gh}` at the source of `β`.
#[derive(Clone, Debug, PartialEq)]
pub struct LAGroupoid {
    pub groupoid: DeskGroupoid,
    pub base: AlgebroidPresentation,
    pub omega: Vec<AlgebroidPresentation>,
    pub source: Vec<PolyMatrix>,
    pub target: Vec<PolyMatrix>,
    pub unit: PolyMatrix,
    pub inverse: Vec<PolyMatrix>,
    pub multiplication: Vec<Vec<PolyMatrix>>,
}

/// Composable pairs over the component `(g, h)`, written over the source of
/// the second arrow. Row `l` of `first`/`second` is the `l`-th frame element.
#[derive(Clone, Debug, PartialEq)]
pub struct PairFrame {
    pub presentation: AlgebroidPresentation,
    pub first: PolyMatrix,
    pub second: PolyMatrix,
    pub free: Vec<usize>,
}

impl PairFrame {
    fn stacked(&self, l: usize) -> Vec<Poly> {
        self.first.row(l).iter().chain(self.second.row(l)).cloned().collect()
    }

    /// Coefficients of a stacked pair in this frame after substituting
    /// `along`, or `None` if the pair is not composable.
    fn decompose(&self, z: &[Poly], along: &[Poly], nvars: usize) -> Option<Vec<Poly>> {
        let coeffs: Vec<Poly> = self.free.iter().map(|&c| z[c].clone()).collect();
        let f = self.first.substitute_or_constant(along, nvars);
        let s = self.second.substitute_or_constant(along, nvars);
        let mut back = vec![Poly::zero(nvars); z.len()];
        for (l, w) in coeffs.iter().enumerate() {
            for (c, e) in f.row(l).iter().chain(s.row(l)).enumerate() {
                back[c] = &back[c] + &(w * e);
            }
        }
        (back == z).then_some(coeffs)
    }
}

fn unit_rows(r: usize, n: usize) -> Vec<Vec<Poly>> {
    PolyMatrix::identity(r, n).to_rows()
}

fn row_times(row: &[Poly], m: &PolyMatrix) -> Vec<Poly> {
    let n = m.nvars();
    (0..m.cols()).map(|j| row.iter().enumerate().fold(Poly::zero(n), |acc, (i, w)| acc + w * m.get(i, j))).collect()
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

fn relabel(v: Verdict, prefix: &str) -> Verdict {
    match v {
        Verdict::Valid => Verdict::Valid,
        Verdict::Invalid(w) => Verdict::Invalid(Witness::new(format!("{prefix}: {}", w.location), w.residue)),
    }
}

macro_rules! check {
    ($v:expr) => {{
        let v = $v;
        if !v.is_valid() {
            return Ok(v);
        }
    }};
}

impl LAGroupoid {
    fn n(&self) -> usize {
        self.base.dim()
    }

    /// Moves every `Ω_g` to the frame `e′_i = Σ_j P_g[i][j] e_j`. The structure
    /// maps are rewritten so that the result is the same LA-groupoid; frames on
    /// the far end of a map covering `l_g` are read at the moved point.
    pub fn change_frames(&self, p: &[PolyMatrix], p_inv: &[PolyMatrix]) -> Result<LAGroupoid> {
        let order = self.groupoid.order();
        let n = self.n();
        if p.len() != order || p_inv.len() != order {
            return Err(Error::Shape("one frame change per arrow component".into()));
        }
        let grp = self.groupoid.group();
        let omega = (0..order).map(|g| self.omega[g].change_frame(&p[g], &p_inv[g])).collect::<Result<Vec<_>>>()?;
        let source = (0..order).map(|g| p[g].mul(&self.source[g])).collect();
        let target = (0..order).map(|g| p[g].mul(&self.target[g])).collect();
        let unit = self.unit.mul(&p_inv[self.e()]);
        let inverse = (0..order)
            .map(|g| {
                let gi = grp.inverse(g);
                p[g].mul(&self.inverse[g]).mul(&p_inv[gi].substitute_or_constant(&self.groupoid.act(g), n))
            })
            .collect();
        let multiplication = (0..order)
            .map(|g| {
                (0..order)
                    .map(|h| {
                        let (rg, rh) = (self.omega[g].rank(), self.omega[h].rank());
                        let pg = p[g].substitute_or_constant(&self.groupoid.act(h), n);
                        let mut block = PolyMatrix::zeros(rg + rh, rg + rh, n);
                        for i in 0..rg {
                            for j in 0..rg {
                                block.set(i, j, pg.get(i, j).clone());
                            }
                        }
                        for i in 0..rh {
                            for j in 0..rh {
                                block.set(rg + i, rg + j, p[h].get(i, j).clone());
                            }
                        }
                        block.mul(&self.multiplication[g][h]).mul(&p_inv[grp.mul(g, h)])
                    })
                    .collect()
            })
            .collect();
        Ok(LAGroupoid { groupoid: self.groupoid.clone(), base: self.base.clone(), omega, source, target, unit, inverse, multiplication })
    }

    fn e(&self) -> usize {
        self.groupoid.group().identity()
    }

    pub fn source_map(&self, g: usize) -> Result<MorphismData> {
        MorphismData::over_identity(self.omega[g].clone(), self.base.clone(), self.source[g].clone())
    }

    pub fn target_map(&self, g: usize) -> Result<MorphismData> {
        MorphismData::new(self.omega[g].clone(), self.base.clone(), self.groupoid.act(g), self.target[g].clone())
    }

    pub fn unit_map(&self) -> Result<MorphismData> {
        MorphismData::over_identity(self.base.clone(), self.omega[self.e()].clone(), self.unit.clone())
    }

    pub fn inverse_map(&self, g: usize) -> Result<MorphismData> {
        let gi = self.groupoid.group().inverse(g);
        MorphismData::new(self.omega[g].clone(), self.omega[gi].clone(), self.groupoid.act(g), self.inverse[g].clone())
    }

    /// `Ω ×_A Ω` over `(g, h)`: the kernel of `(α, β) ↦ s̃(α) − t̃(β)` with the
    /// bracket computed in `Ω_h` and read back in the pair frame.
    pub fn pair_frame(&self, g: usize, h: usize) -> Result<PairFrame> {
        let n = self.n();
        let (rg, rh, ra) = (self.omega[g].rank(), self.omega[h].rank(), self.base.rank());
        let lh = self.groupoid.act(h);
        let s_shift = self.source[g].substitute_or_constant(&lh, n);
        let mut c = PolyMatrix::zeros(ra, rg + rh, n);
        for a in 0..ra {
            for i in 0..rg {
                c.set(a, i, s_shift.get(i, a).clone());
            }
            for i in 0..rh {
                c.set(a, rg + i, -self.target[h].get(i, a));
            }
        }
        let kernel = c.constant_pivot_kernel()?;
        let rows = kernel.basis.len();
        let first = PolyMatrix::from_rows(n, kernel.basis.iter().map(|z| z[..rg].to_vec()).collect());
        let second = PolyMatrix::from_rows(n, kernel.basis.iter().map(|z| z[rg..].to_vec()).collect());
        let mut frame = PairFrame { presentation: AlgebroidPresentation::abelian(n, 0), first, second, free: kernel.free };

        let oh = &self.omega[h];
        let og = &self.omega[g];
        let back = self.groupoid.act_inv(h);
        let anchor = PolyMatrix::from_rows(n, (0..rows).map(|l| oh.anchor_section(frame.second.row(l))).collect());
        let id: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
        let mut structure = vec![Poly::zero(n); rows * rows * rows];
        for l in 0..rows {
            for m in l + 1..rows {
                let lower = oh.bracket(frame.second.row(l), frame.second.row(m));
                let moved = |row: &[Poly]| row.iter().map(|p| pull(p, &back, n)).collect::<Vec<_>>();
                let upper: Vec<Poly> = og
                    .bracket(&moved(frame.first.row(l)), &moved(frame.first.row(m)))
                    .iter()
                    .map(|p| pull(p, &lh, n))
                    .collect();
                let z: Vec<Poly> = upper.into_iter().chain(lower).collect();
                let coeffs = frame.decompose(&z, &id, n).ok_or_else(|| {
                    Error::Inconsistent(format!("bracket of pair frame elements {} and {} leaves Ω ×_A Ω", l + 1, m + 1))
                })?;
                for (k, w) in coeffs.into_iter().enumerate() {
                    structure[(l * rows + m) * rows + k] = w.clone();
                    structure[(m * rows + l) * rows + k] = -w;
                }
            }
        }
        frame.presentation = AlgebroidPresentation::from_structure(n, rows, anchor, structure)?;
        Ok(frame)
    }

    fn pair_projections(&self, g: usize, h: usize, pf: &PairFrame) -> Result<(MorphismData, MorphismData, MorphismData)> {
        let gh = self.groupoid.group().mul(g, h);
        let pr1 = MorphismData::new(pf.presentation.clone(), self.omega[g].clone(), self.groupoid.act(h), pf.first.clone())?;
        let pr2 = MorphismData::over_identity(pf.presentation.clone(), self.omega[h].clone(), pf.second.clone())?;
        let stacked = PolyMatrix::from_rows(self.n(), (0..pf.presentation.rank()).map(|l| pf.stacked(l)).collect());
        let m = MorphismData::over_identity(pf.presentation.clone(), self.omega[gh].clone(), stacked.mul(&self.multiplication[g][h]))?;
        Ok((pr1, pr2, m))
    }

    /// `m̃(α, β)` for a pair written in coordinates `y` with `x = along(y)`
    /// the source of `β`.
    fn multiply(&self, frames: &[Vec<PairFrame>], g: usize, h: usize, alpha: &[Poly], beta: &[Poly], along: &[Poly], nvars: usize) -> Option<Vec<Poly>> {
        let z: Vec<Poly> = alpha.iter().chain(beta).cloned().collect();
        let pf = &frames[g][h];
        let coeffs = pf.decompose(&z, along, nvars)?;
        let stacked = PolyMatrix::from_rows(self.n(), (0..pf.presentation.rank()).map(|l| pf.stacked(l)).collect());
        let product = stacked.mul(&self.multiplication[g][h]).substitute_or_constant(along, nvars);
        Some(row_times(&coeffs, &product))
    }
}

/// The structure maps of `Ω = s!A` from a verified `(A, ψ)`:
/// `s̃ = id`, `t̃ = ψ_g`, `ũ = id`, `ĩ = ψ_g`, and `m̃` keeps the second entry.
pub fn build_la_groupoid(ga: &GroupoidAlgebroid) -> Result<LAGroupoid> {
    if !verify_groupoid_algebroid(ga)?.is_valid() {
        return Err(Error::Invalid("groupoid algebroid does not verify".into()));
    }
    let g = &ga.groupoid;
    let a = &ga.algebroid;
    let (n, r) = (a.dim(), a.rank());
    let omega_g = PullbackAlgebroid::along_submersion(&SplitSubmersion::identity(n), a)?.presentation().clone();
    let order = g.order();
    let id = PolyMatrix::identity(r, n);
    let mut keep_second = PolyMatrix::zeros(2 * r, r, n);
    for i in 0..r {
        keep_second.set(r + i, i, Poly::one(n));
    }
    Ok(LAGroupoid {
        groupoid: g.clone(),
        base: a.clone(),
        omega: vec![omega_g; order],
        source: vec![id.clone(); order],
        target: ga.psi.clone(),
        unit: id,
        inverse: ga.psi.clone(),
        multiplication: vec![vec![keep_second; order]; order],
    })
}

/// Every structure map is a morphism over its base map, the groupoid axioms
/// hold for `Ω ⇉ A`, and the anchors intertwine `s̃, t̃` with `s_*, t_*`.
pub fn verify_la_groupoid(l: &LAGroupoid) -> Result<Verdict> {
    let grp = l.groupoid.group();
    let order = grp.order();
    let (n, ra) = (l.n(), l.base.rank());
    check!(verify_groupoid(&l.groupoid));
    if l.omega.len() != order || l.source.len() != order || l.target.len() != order || l.inverse.len() != order {
        return Err(Error::Shape("one Ω component and structure matrix per arrow".into()));
    }
    if l.multiplication.len() != order || l.multiplication.iter().any(|r| r.len() != order) {
        return Err(Error::Shape("one multiplication matrix per composable pair of components".into()));
    }
    check!(relabel(verify_algebroid(&l.base), "A"));
    for g in 0..order {
        check!(relabel(verify_algebroid(&l.omega[g]), &format!("Ω_g{}", g + 1)));
    }
    let e = l.e();
    let id = |r: usize| PolyMatrix::identity(r, n);

    // structure maps are algebroid morphisms
    for g in 0..order {
        check!(relabel(check_morphism(&l.source_map(g)?), &format!("s̃ on Ω_g{}", g + 1)));
        check!(relabel(check_morphism(&l.target_map(g)?), &format!("t̃ on Ω_g{}", g + 1)));
        check!(relabel(check_morphism(&l.inverse_map(g)?), &format!("ĩ on Ω_g{}", g + 1)));
    }
    check!(relabel(check_morphism(&l.unit_map()?), "ũ"));

    // anchors: ã = a∘s̃ and (l_g)_* ã = a∘t̃
    for g in 0..order {
        for i in 0..l.omega[g].rank() {
            let lhs = l.omega[g].anchor_of(i);
            check!(vector_verdict(lhs, &l.base.anchor_section(l.source[g].row(i)), &format!("s_* ã ≠ a s̃ on Ω_g{}, ω{}", g + 1, i + 1)));
            let moved = act_on_section(&l.groupoid, &l.target, g, &unit_rows(l.omega[g].rank(), n)[i]);
            check!(vector_verdict(
                &push_field(&l.groupoid, g, lhs),
                &l.base.anchor_section(&moved),
                &format!("t_* ã ≠ a t̃ on Ω_g{}, ω{}", g + 1, i + 1)
            ));
        }
    }

    // units and inverses
    check!(matrix_verdict(&l.unit.mul(&l.source[e]).sub(&id(ra)), "s̃ũ ≠ id"));
    check!(matrix_verdict(&l.unit.mul(&l.target[e]).sub(&id(ra)), "t̃ũ ≠ id"));
    for g in 0..order {
        let gi = grp.inverse(g);
        let lg = l.groupoid.act(g);
        let shift = |m: &PolyMatrix| m.substitute_or_constant(&lg, n);
        let tag = |what: &str| format!("{what} on Ω_g{}", g + 1);
        check!(matrix_verdict(&l.inverse[g].mul(&shift(&l.source[gi])).sub(&l.target[g]), &tag("s̃ĩ ≠ t̃")));
        check!(matrix_verdict(&l.inverse[g].mul(&shift(&l.target[gi])).sub(&l.source[g]), &tag("t̃ĩ ≠ s̃")));
        check!(matrix_verdict(&l.inverse[g].mul(&shift(&l.inverse[gi])).sub(&id(l.omega[g].rank())), &tag("ĩĩ ≠ id")));
    }

    // composable pairs and multiplication
    let frames: Vec<Vec<PairFrame>> =
        (0..order).map(|g| (0..order).map(|h| l.pair_frame(g, h)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    for g in 0..order {
        for h in 0..order {
            let pf = &frames[g][h];
            let gh = grp.mul(g, h);
            let tag = |what: &str| format!("{what} on (g{}, g{})", g + 1, h + 1);
            check!(relabel(verify_algebroid(&pf.presentation), &tag("Ω ×_A Ω")));
            let (pr1, pr2, m) = l.pair_projections(g, h, pf)?;
            check!(relabel(check_morphism(&pr1), &tag("pr₁")));
            check!(relabel(check_morphism(&pr2), &tag("pr₂")));
            check!(relabel(check_morphism(&m), &tag("m̃")));
            check!(matrix_verdict(&m.matrix.mul(&l.source[gh]).sub(&pf.second.mul(&l.source[h])), &tag("s̃m̃ ≠ s̃pr₂")));
            let lhs = m.matrix.mul(&l.target[gh]);
            let rhs = pf.first.mul(&l.target[g].substitute_or_constant(&l.groupoid.act(h), n));
            check!(matrix_verdict(&lhs.sub(&rhs), &tag("t̃m̃ ≠ t̃pr₁")));
        }
    }

    let here: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    let not_composable = |what: String| Verdict::Invalid(Witness::new(what, Poly::one(n)));
    for g in 0..order {
        let rg = l.omega[g].rank();
        let gi = grp.inverse(g);
        let lg = l.groupoid.act(g);
        let lgi = l.groupoid.act(gi);
        for i in 0..rg {
            let w = unit_rows(rg, n)[i].clone();
            // m̃(ũ t̃ ω, ω) = ω over (e, g)
            let left = row_times(l.target[g].row(i), &l.unit.substitute_or_constant(&lg, n));
            match l.multiply(&frames, e, g, &left, &w, &here, n) {
                Some(p) => check!(vector_verdict(&p, &w, &format!("m̃(ũt̃ω, ω) ≠ ω on Ω_g{}, ω{}", g + 1, i + 1))),
                None => return Ok(not_composable(format!("(ũt̃ω, ω) not composable on Ω_g{}, ω{}", g + 1, i + 1))),
            }
            // m̃(ω, ũ s̃ ω) = ω over (g, e)
            let right = row_times(l.source[g].row(i), &l.unit);
            match l.multiply(&frames, g, e, &w, &right, &here, n) {
                Some(p) => check!(vector_verdict(&p, &w, &format!("m̃(ω, ũs̃ω) ≠ ω on Ω_g{}, ω{}", g + 1, i + 1))),
                None => return Ok(not_composable(format!("(ω, ũs̃ω) not composable on Ω_g{}, ω{}", g + 1, i + 1))),
            }
            // m̃(ĩω, ω) = ũ s̃ ω over (g⁻¹, g)
            match l.multiply(&frames, gi, g, l.inverse[g].row(i), &w, &here, n) {
                Some(p) => check!(vector_verdict(&p, &right, &format!("m̃(ĩω, ω) ≠ ũs̃ω on Ω_g{}, ω{}", g + 1, i + 1))),
                None => return Ok(not_composable(format!("(ĩω, ω) not composable on Ω_g{}, ω{}", g + 1, i + 1))),
            }
            // m̃(ω, ĩω) = ũ t̃ ω over (g, g⁻¹), written at y = gx
            let inv_at_y: Vec<Poly> = l.inverse[g].row(i).iter().map(|p| pull(p, &lgi, n)).collect();
            let expected = row_times(
                &l.target[g].row(i).iter().map(|p| pull(p, &lgi, n)).collect::<Vec<_>>(),
                &l.unit,
            );
            match l.multiply(&frames, g, gi, &w, &inv_at_y, &here, n) {
                Some(p) => check!(vector_verdict(&p, &expected, &format!("m̃(ω, ĩω) ≠ ũt̃ω on Ω_g{}, ω{}", g + 1, i + 1))),
                None => return Ok(not_composable(format!("(ω, ĩω) not composable on Ω_g{}, ω{}", g + 1, i + 1))),
            }
        }
    }

    // associativity on a frame of composable triples
    for g in 0..order {
        for h in 0..order {
            for k in 0..order {
                let (rg, rh, rk) = (l.omega[g].rank(), l.omega[h].rank(), l.omega[k].rank());
                let lk = l.groupoid.act(k);
                let lhk = l.groupoid.act(grp.mul(h, k));
                let s_g = l.source[g].substitute_or_constant(&lhk, n);
                let t_h = l.target[h].substitute_or_constant(&lk, n);
                let s_h = l.source[h].substitute_or_constant(&lk, n);
                let mut c = PolyMatrix::zeros(2 * ra, rg + rh + rk, n);
                for a in 0..ra {
                    for i in 0..rg {
                        c.set(a, i, s_g.get(i, a).clone());
                    }
                    for i in 0..rh {
                        c.set(a, rg + i, -t_h.get(i, a));
                        c.set(ra + a, rg + i, s_h.get(i, a).clone());
                    }
                    for i in 0..rk {
                        c.set(ra + a, rg + rh + i, -l.target[k].get(i, a));
                    }
                }
                for z in c.constant_pivot_kernel()?.basis {
                    let (alpha, rest) = z.split_at(rg);
                    let (beta, gamma) = rest.split_at(rh);
                    let tag = format!("associativity on (g{}, g{}, g{})", g + 1, h + 1, k + 1);
                    let lhs = l
                        .multiply(&frames, g, h, alpha, beta, &lk, n)
                        .and_then(|d| l.multiply(&frames, grp.mul(g, h), k, &d, gamma, &here, n));
                    let rhs = l
                        .multiply(&frames, h, k, beta, gamma, &here, n)
                        .and_then(|d| l.multiply(&frames, g, grp.mul(h, k), alpha, &d, &here, n));
                    match (lhs, rhs) {
                        (Some(p), Some(q)) => check!(vector_verdict(&p, &q, &tag)),
                        _ => return Ok(not_composable(format!("{tag}: partial products not composable"))),
                    }
                }
            }
        }
    }
    Ok(Verdict::Valid)
}

fn rank_mismatch(l: &LAGroupoid, g: usize) -> Option<Verdict> {
    let (rg, ra) = (l.omega[g].rank(), l.base.rank());
    (rg != ra).then(|| {
        Verdict::Invalid(Witness::new(
            format!("rank Ω_g{} = {rg} but rank A = {ra}", g + 1),
            Poly::from_int(l.n(), rg as i64 - ra as i64),
        ))
    })
}

/// `(ã, s̃): Ω_g → s!A` on each component, as a matrix in the frame of `s!A`.
pub fn bang_comparison(l: &LAGroupoid, g: usize) -> Result<(PullbackAlgebroid, MorphismData)> {
    let n = l.n();
    let pb = PullbackAlgebroid::along_submersion(&SplitSubmersion::identity(n), &l.base)?;
    let rows = (0..l.omega[g].rank())
        .map(|i| pb.decompose(&Pair { vector: l.omega[g].anchor_of(i).to_vec(), coeffs: l.source[g].row_vec(i) }))
        .collect::<Result<Vec<_>>>()?;
    let m = MorphismData::over_identity(l.omega[g].clone(), pb.presentation().clone(), PolyMatrix::from_rows(n, rows))?;
    Ok((pb, m))
}

/// `(ã, s̃): Ω → s!A` is an isomorphism of algebroids on every component.
pub fn check_bang_vacant(l: &LAGroupoid) -> Result<Verdict> {
    for g in 0..l.groupoid.order() {
        if let Some(v) = rank_mismatch(l, g) {
            return Ok(v);
        }
        let (_, m) = bang_comparison(l, g)?;
        check!(relabel(check_morphism(&m), &format!("(ã, s̃) on Ω_g{}", g + 1)));
        let det = m.matrix.det();
        if det.is_zero() || !det.is_constant() {
            return Ok(Verdict::Invalid(Witness::new(format!("det (ã, s̃) on Ω_g{} is not a unit", g + 1), det)));
        }
        let inv = m.inverse()?;
        check!(relabel(check_morphism(&inv), &format!("(ã, s̃)⁻¹ on Ω_g{}", g + 1)));
    }
    Ok(Verdict::Valid)
}

/// `(π̃, s̃): Ω → s*A` is an isomorphism of vector bundles on every component.
pub fn check_vacant(l: &LAGroupoid) -> Verdict {
    for g in 0..l.groupoid.order() {
        if let Some(v) = rank_mismatch(l, g) {
            return v;
        }
        let det = l.source[g].det();
        if det.is_zero() || !det.is_constant() {
            return Verdict::Invalid(Witness::new(format!("det s̃ on Ω_g{} is not a unit", g + 1), det));
        }
    }
    Verdict::Valid
}

/// Total spaces of `Ω_g` and `A` have equal dimension on every component.
pub fn equal_dimensions(l: &LAGroupoid) -> bool {
    let n = l.n();
    l.omega.iter().all(|o| o.dim() + o.rank() == n + l.base.rank())
}

/// `ψ_g = t̃∘(ã, s̃)⁻¹` on each component.
pub fn f2_recover(l: &LAGroupoid) -> Result<GroupoidAlgebroid> {
    if !check_bang_vacant(l)?.is_valid() {
        return Err(Error::Invalid("LA-groupoid is not !-vacant".into()));
    }
    let psi = (0..l.groupoid.order())
        .map(|g| {
            let (pb, m) = bang_comparison(l, g)?;
            // the frame of s!A along the identity is (a(e_i), e_i), so s!A → A is read off the coefficients
            let to_a = PolyMatrix::from_rows(l.n(), pb.frame().iter().map(|p| p.coeffs.clone()).collect());
            let inv = m.matrix.inverse()?;
            let sigma_inv = to_a.inverse()?.mul(&inv);
            Ok(sigma_inv.mul(&l.target[g]))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupoidAlgebroid::new(l.groupoid.clone(), l.base.clone(), psi)
}

/// `(Φ_g, φ): L₁ → L₂` commutes with `s̃, t̃, ũ` and each piece is an
/// algebroid morphism.
pub fn check_la_morphism(l1: &LAGroupoid, l2: &LAGroupoid, arrows: &[PolyMatrix], base: &PolyMatrix) -> Result<Verdict> {
    if l1.groupoid != l2.groupoid || arrows.len() != l1.groupoid.order() {
        return Err(Error::Shape("LA-groupoid morphism over a common groupoid, one matrix per arrow".into()));
    }
    let n = l1.n();
    check!(relabel(check_morphism(&MorphismData::over_identity(l1.base.clone(), l2.base.clone(), base.clone())?), "φ"));
    for (g, phi) in arrows.iter().enumerate() {
        let m = MorphismData::over_identity(l1.omega[g].clone(), l2.omega[g].clone(), phi.clone())?;
        check!(relabel(check_morphism(&m), &format!("Φ_g{}", g + 1)));
        check!(matrix_verdict(&phi.mul(&l2.source[g]).sub(&l1.source[g].mul(base)), &format!("Φ s̃ ≠ s̃ φ on g{}", g + 1)));
        let shifted = base.substitute_or_constant(&l1.groupoid.act(g), n);
        check!(matrix_verdict(&phi.mul(&l2.target[g]).sub(&l1.target[g].mul(&shifted)), &format!("Φ t̃ ≠ t̃ φ on g{}", g + 1)));
    }
    let e = l1.e();
    check!(matrix_verdict(&l1.unit.mul(&arrows[e]).sub(&base.mul(&l2.unit)), "ũΦ ≠ φũ"));
    Ok(Verdict::Valid)
}

/// `F₁` on an equivariant morphism: the same matrix on every component.
pub fn f1_morphism(l: &LAGroupoid, rho: &PolyMatrix) -> Vec<PolyMatrix> {
    vec![rho.clone(); l.groupoid.order()]
}

/// `F₂` on a morphism of LA-groupoids: its base part.
pub fn f2_morphism(base: &PolyMatrix) -> PolyMatrix {
    base.clone()
}

/// `F₁F₂(L) ≅ L` through `(ã, s̃)`: the components `S_g` form an isomorphism
/// of LA-groupoids `L → F₁F₂(L)`.
pub fn roundtrip_iso(l: &LAGroupoid) -> Result<(LAGroupoid, Verdict)> {
    let rebuilt = build_la_groupoid(&f2_recover(l)?)?;
    let base = PolyMatrix::identity(l.base.rank(), l.n());
    let verdict = check_la_morphism(l, &rebuilt, &l.source, &base)?;
    let mut v = verdict;
    if v.is_valid() {
        for (g, s) in l.source.iter().enumerate() {
            let det = s.det();
            if det.is_zero() || !det.is_constant() {
                v = Verdict::Invalid(Witness::new(format!("S_g{} not invertible", g + 1), det));
                break;
            }
        }
    }
    Ok((rebuilt, v))
}

/// The square `S₁_g·F₁F₂(Φ)_g = Φ_g·S₂_g` for a morphism `Φ: L₁ → L₂`.
pub fn naturality_square(l1: &LAGroupoid, l2: &LAGroupoid, arrows: &[PolyMatrix], base: &PolyMatrix) -> Verdict {
    let back = f1_morphism(l1, &f2_morphism(base));
    for g in 0..l1.groupoid.order() {
        let v = matrix_verdict(
            &l1.source[g].mul(&back[g]).sub(&arrows[g].mul(&l2.source[g])),
            &format!("naturality square on g{}", g + 1),
        );
        if !v.is_valid() {
            return v;
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

    fn sign_line() -> GroupoidAlgebroid {
        let g = DeskGroupoid::over_point(FiniteGroup::cyclic(2));
        let psi = vec![PolyMatrix::identity(1, 0), PolyMatrix::from_rows(0, vec![vec![Poly::from_int(0, -1)]])];
        GroupoidAlgebroid::new(g, AlgebroidPresentation::abelian(0, 1), psi).unwrap()
    }

    fn tangent_reflection() -> GroupoidAlgebroid {
        let flip = AffineMap::new(RatMatrix::from_ints(&[&[-1]]), vec![int(0)]).unwrap();
        let id = AffineMap::identity(1);
        let g = DeskGroupoid::transformation(FiniteGroup::cyclic(2), 1, vec![id.clone(), flip.clone()], vec![id, flip]).unwrap();
        let minus = PolyMatrix::from_rows(1, vec![vec![Poly::from_int(1, -1)]]);
        GroupoidAlgebroid::new(g, AlgebroidPresentation::tangent(1), vec![PolyMatrix::identity(1, 1), minus]).unwrap()
    }

    #[test]
    fn trivial_group_gives_identity_maps() {
        let ga = GroupoidAlgebroid::trivial(DeskGroupoid::over_point(FiniteGroup::trivial()), AlgebroidPresentation::abelian(0, 2)).unwrap();
        let l = build_la_groupoid(&ga).unwrap();
        assert!(verify_la_groupoid(&l).unwrap().is_valid());
        assert!(l.target[0].is_identity() && l.inverse[0].is_identity());
    }

    #[test]
    fn sign_action() {
        let ga = sign_line();
        let l = build_la_groupoid(&ga).unwrap();
        assert_eq!(l.omega.len(), 2);
        assert_eq!(l.inverse[1].get(0, 0), &Poly::from_int(0, -1));
        assert!(verify_la_groupoid(&l).unwrap().is_valid());
        assert!(check_bang_vacant(&l).unwrap().is_valid());
        assert!(check_vacant(&l).is_valid());
        assert_eq!(f2_recover(&l).unwrap(), ga);
        let (_, v) = roundtrip_iso(&l).unwrap();
        assert!(v.is_valid());
    }

    #[test]
    fn tangent_groupoid_of_reflection() {
        let l = build_la_groupoid(&tangent_reflection()).unwrap();
        assert!(verify_la_groupoid(&l).unwrap().is_valid());
        for o in &l.omega {
            assert_eq!(o, &AlgebroidPresentation::tangent(1));
        }
    }

    #[test]
    fn zero_omega_is_not_vacant() {
        let ga = sign_line();
        let mut l = build_la_groupoid(&ga).unwrap();
        l.omega = vec![AlgebroidPresentation::abelian(0, 0); 2];
        l.source = vec![PolyMatrix::zeros(0, 1, 0); 2];
        l.target = l.source.clone();
        assert!(!check_bang_vacant(&l).unwrap().is_valid());
        assert!(!check_vacant(&l).is_valid());
        assert!(!equal_dimensions(&l));
    }

    #[test]
    fn broken_multiplication_is_caught() {
        let mut l = build_la_groupoid(&tangent_reflection()).unwrap();
        l.multiplication[1][1].set(1, 0, Poly::from_int(1, 2));
        assert!(!verify_la_groupoid(&l).unwrap().is_valid());
    }

    #[test]
    fn morphism_roundtrip() {
        let ga = sign_line();
        let l = build_la_groupoid(&ga).unwrap();
        let rho = PolyMatrix::from_rows(0, vec![vec![Poly::from_int(0, 2)]]);
        let arrows = f1_morphism(&l, &rho);
        assert!(check_la_morphism(&l, &l, &arrows, &rho).unwrap().is_valid());
        assert_eq!(f2_morphism(&rho), rho);
        assert!(naturality_square(&l, &l, &arrows, &rho).is_valid());
    }

    #[test]
    fn regauged_frames_give_a_nontrivial_roundtrip() {
        let ga = tangent_reflection();
        let l = build_la_groupoid(&ga).unwrap();
        let p = vec![
            PolyMatrix::from_rows(1, vec![vec![Poly::from_int(1, 3)]]),
            PolyMatrix::from_rows(1, vec![vec![Poly::from_int(1, -2)]]),
        ];
        let p_inv: Vec<PolyMatrix> = p.iter().map(|m| m.inverse().unwrap()).collect();
        let moved = l.change_frames(&p, &p_inv).unwrap();
        assert!(verify_la_groupoid(&moved).unwrap().is_valid());
        assert!(!moved.source[1].is_identity());
        assert_eq!(f2_recover(&moved).unwrap(), ga);
        let (rebuilt, v) = roundtrip_iso(&moved).unwrap();
        assert!(v.is_valid());
        assert_eq!(rebuilt, l);
        let id = PolyMatrix::identity(1, 1);
        assert!(check_la_morphism(&moved, &l, &p, &id).unwrap().is_valid());
        assert!(naturality_square(&moved, &l, &p, &id).is_valid());

        let heis = GroupoidAlgebroid::trivial(
            DeskGroupoid::over_point(FiniteGroup::cyclic(2)),
            crate::samples::heisenberg(),
        )
        .unwrap();
        let l = build_la_groupoid(&heis).unwrap();
        let shear = |c: i64| {
            let mut m = PolyMatrix::identity(3, 0);
            m.set(0, 2, Poly::from_int(0, c));
            m
        };
        let p = vec![shear(1), shear(-4)];
        let p_inv = vec![shear(-1), shear(4)];
        let moved = l.change_frames(&p, &p_inv).unwrap();
        assert!(verify_la_groupoid(&moved).unwrap().is_valid());
        assert!(roundtrip_iso(&moved).unwrap().1.is_valid());
        let mut bad = moved.clone();
        bad.multiplication = l.multiplication.clone();
        assert!(!verify_la_groupoid(&bad).unwrap().is_valid());
    }
}
