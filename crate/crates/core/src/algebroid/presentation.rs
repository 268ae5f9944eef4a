use std::fmt;

use super::forms::{de_rham_d, Form};
use crate::exactalg::{Poly, PolyMatrix, Rational};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

/// The base of a chart-level algebroid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChartBase {
    Point,
    Affine(usize),
    /// Labelled affine charts; algebroids over it are stored componentwise.
    DisjointUnion(Vec<(String, usize)>),
}

impl ChartBase {
    pub fn affine(n: usize) -> Self {
        if n == 0 {
            ChartBase::Point
        } else {
            ChartBase::Affine(n)
        }
    }

    /// Dimension of a connected chart.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ChartBase::Point => Some(0),
            ChartBase::Affine(n) => Some(*n),
            ChartBase::DisjointUnion(_) => None,
        }
    }
}

impl fmt::Display for ChartBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartBase::Point => write!(f, "Point"),
            ChartBase::Affine(n) => write!(f, "Affine({n})"),
            ChartBase::DisjointUnion(parts) => {
                let p: Vec<String> = parts.iter().map(|(l, n)| format!("{l}:Affine({n})")).collect();
                write!(f, "DisjointUnion({})", p.join(", "))
            }
        }
    }
}

/// A vector field applied to a function: `Σ v_μ ∂_μ f`.
pub fn apply_vector(v: &[Poly], f: &Poly) -> Poly {
    let mut acc = Poly::zero(f.nvars());
    for (mu, vm) in v.iter().enumerate() {
        if vm.is_zero() {
            continue;
        }
        let d = f.derive(mu);
        if !d.is_zero() {
            acc = acc + vm * &d;
        }
    }
    acc
}

/// Lie bracket of coordinate vector fields.
pub fn lie_bracket(v: &[Poly], w: &[Poly]) -> Vec<Poly> {
    (0..v.len()).map(|mu| apply_vector(v, &w[mu]) - apply_vector(w, &v[mu])).collect()
}

/// A Lie algebroid presented on a connected chart by a frame `e_1 … e_r`.
///
/// `anchor` is `r × n`: row `i` holds the components of `a(e_i)` along
/// `∂_1 … ∂_n`. Structure functions satisfy `[e_i, e_j] = Σ_k c^k_{ij} e_k`
/// and are stored for every ordered pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebroidPresentation {
    dim: usize,
    rank: usize,
    anchor: PolyMatrix,
    structure: Vec<Poly>,
}

impl AlgebroidPresentation {
    /// Builds a presentation from brackets of frame pairs. Unlisted pairs
    /// bracket to zero; listing `(i, j)` determines `(j, i)`.
    pub fn new(dim: usize, rank: usize, anchor: PolyMatrix, brackets: Vec<((usize, usize), Vec<Poly>)>) -> Result<Self> {
        let mut structure = vec![Poly::zero(dim); rank * rank * rank];
        let mut seen = vec![false; rank * rank];
        for ((i, j), coeffs) in brackets {
            if i >= rank || j >= rank || coeffs.len() != rank {
                return Err(Error::Shape(format!("bracket ({i},{j}) outside rank {rank}")));
            }
            if coeffs.iter().any(|p| p.nvars() != dim) {
                return Err(Error::Shape("structure function in wrong variable count".into()));
            }
            if i == j {
                if let Some((k, p)) = coeffs.iter().enumerate().find(|(_, p)| !p.is_zero()) {
                    return Err(Error::Antisymmetry(format!("c^{}_{{{}{}}} = {p}", k + 1, i + 1, i + 1)));
                }
                continue;
            }
            for (k, p) in coeffs.into_iter().enumerate() {
                let a = (i * rank + j) * rank + k;
                let b = (j * rank + i) * rank + k;
                if seen[j * rank + i] {
                    if structure[b] != -&p {
                        return Err(Error::Antisymmetry(format!(
                            "c^{k1}_{{{i1}{j1}}} and c^{k1}_{{{j1}{i1}}} do not cancel",
                            k1 = k + 1,
                            i1 = i + 1,
                            j1 = j + 1
                        )));
                    }
                } else if seen[i * rank + j] && structure[a] != p {
                    return Err(Error::Antisymmetry(format!("c_{{{}{}}} listed twice", i + 1, j + 1)));
                }
                structure[b] = -&p;
                structure[a] = p;
            }
            seen[i * rank + j] = true;
        }
        Self::from_structure(dim, rank, anchor, structure)
    }

    /// Full structure array indexed `c[(i·r + j)·r + k] = c^k_{ij}`; must be antisymmetric.
    pub fn from_structure(dim: usize, rank: usize, anchor: PolyMatrix, structure: Vec<Poly>) -> Result<Self> {
        if anchor.rows() != rank || anchor.cols() != dim || anchor.nvars() != dim {
            return Err(Error::Shape(format!(
                "anchor is {}x{} in {} variables, expected {rank}x{dim}",
                anchor.rows(),
                anchor.cols(),
                anchor.nvars()
            )));
        }
        if structure.len() != rank * rank * rank || structure.iter().any(|p| p.nvars() != dim) {
            return Err(Error::Shape("structure function array".into()));
        }
        for i in 0..rank {
            for j in 0..rank {
                for k in 0..rank {
                    let a = &structure[(i * rank + j) * rank + k];
                    let b = &structure[(j * rank + i) * rank + k];
                    if !(a + b).is_zero() {
                        return Err(Error::Antisymmetry(format!(
                            "c^{}_{{{}{}}} + c^{}_{{{}{}}} = {}",
                            k + 1,
                            i + 1,
                            j + 1,
                            k + 1,
                            j + 1,
                            i + 1,
                            a + b
                        )));
                    }
                }
            }
        }
        Ok(AlgebroidPresentation { dim, rank, anchor, structure })
    }

    /// A Lie algebra over a point from constants `[e_i, e_j] += c e_k` with `i < j`.
    pub fn lie_algebra(rank: usize, constants: &[(usize, usize, usize, Rational)]) -> Result<Self> {
        let mut brackets: Vec<((usize, usize), Vec<Poly>)> = Vec::new();
        for (i, j, k, c) in constants {
            if let Some(entry) = brackets.iter_mut().find(|(p, _)| *p == (*i, *j)) {
                entry.1[*k] = &entry.1[*k] + &Poly::constant(0, c.clone());
            } else {
                let mut v = vec![Poly::zero(0); rank];
                v[*k] = Poly::constant(0, c.clone());
                brackets.push(((*i, *j), v));
            }
        }
        Self::new(0, rank, PolyMatrix::zeros(rank, 0, 0), brackets)
    }

    /// The tangent algebroid of `Affine(n)` in the coordinate frame.
    pub fn tangent(n: usize) -> Self {
        Self::from_structure(n, n, PolyMatrix::identity(n, n), vec![Poly::zero(n); n * n * n]).expect("tangent")
    }

    /// Zero anchor and zero bracket.
    pub fn abelian(dim: usize, rank: usize) -> Self {
        Self::from_structure(dim, rank, PolyMatrix::zeros(rank, dim, dim), vec![Poly::zero(dim); rank * rank * rank])
            .expect("abelian")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn base(&self) -> ChartBase {
        ChartBase::affine(self.dim)
    }

    pub fn anchor(&self) -> &PolyMatrix {
        &self.anchor
    }

    pub fn anchor_of(&self, i: usize) -> &[Poly] {
        self.anchor.row(i)
    }

    pub fn structure(&self) -> &[Poly] {
        &self.structure
    }

    /// `c^k_{ij}`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Poly {
        &self.structure[(i * self.rank + j) * self.rank + k]
    }

    /// Coefficients of `[e_i, e_j]`.
    pub fn bracket_of(&self, i: usize, j: usize) -> Vec<Poly> {
        (0..self.rank).map(|k| self.c(i, j, k).clone()).collect()
    }

    /// `a(e_i)(f)`.
    pub fn act(&self, i: usize, f: &Poly) -> Poly {
        apply_vector(self.anchor_of(i), f)
    }

    /// Anchor image of a section given by frame coefficients.
    pub fn anchor_section(&self, xi: &[Poly]) -> Vec<Poly> {
        let mut v = vec![Poly::zero(self.dim); self.dim];
        for (i, f) in xi.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (mu, a) in self.anchor_of(i).iter().enumerate() {
                if !a.is_zero() {
                    v[mu] = &v[mu] + &(f * a);
                }
            }
        }
        v
    }

    /// Bracket of sections `Σ f_i e_i` and `Σ g_j e_j`, extended by the Leibniz rule.
    pub fn bracket(&self, xi: &[Poly], nu: &[Poly]) -> Vec<Poly> {
        let r = self.rank;
        let mut out = vec![Poly::zero(self.dim); r];
        for i in 0..r {
            if xi[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if nu[j].is_zero() || i == j {
                    continue;
                }
                let fg = &xi[i] * &nu[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        *o = &*o + &(&fg * c);
                    }
                }
            }
        }
        let axi = self.anchor_section(xi);
        let anu = self.anchor_section(nu);
        for k in 0..r {
            out[k] = &out[k] + &apply_vector(&axi, &nu[k]) - apply_vector(&anu, &xi[k]);
        }
        out
    }

    pub fn frame_section(&self, i: usize) -> Vec<Poly> {
        (0..self.rank).map(|j| if i == j { Poly::one(self.dim) } else { Poly::zero(self.dim) }).collect()
    }

    /// Presentation in the frame `e'_i = Σ_j P_{ij} e_j`, with `P⁻¹` supplied.
    pub fn change_frame(&self, p: &PolyMatrix, p_inv: &PolyMatrix) -> Result<Self> {
        let r = self.rank;
        if p.rows() != r || p.cols() != r || p.nvars() != self.dim {
            return Err(Error::Shape("frame change matrix".into()));
        }
        if !p.mul(p_inv).is_identity() {
            return Err(Error::BadInverse("P·P⁻¹ ≠ 1 for frame change".into()));
        }
        let anchor = p.mul(&self.anchor);
        let mut structure = vec![Poly::zero(self.dim); r * r * r];
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                let old = self.bracket(p.row(i), p.row(j));
                for k in 0..r {
                    let mut acc = Poly::zero(self.dim);
                    for (b, ob) in old.iter().enumerate() {
                        if !ob.is_zero() {
                            acc = acc + ob * p_inv.get(b, k);
                        }
                    }
                    structure[(i * r + j) * r + k] = acc;
                }
            }
        }
        Self::from_structure(self.dim, r, anchor, structure)
    }

    /// Reorders the frame: new `e_i` is old `e_{perm[i]}`.
    pub fn permute_frame(&self, perm: &[usize]) -> Result<Self> {
        let r = self.rank;
        let mut p = PolyMatrix::zeros(r, r, self.dim);
        for (i, &j) in perm.iter().enumerate() {
            p.set(i, j, Poly::one(self.dim));
        }
        self.change_frame(&p, &p.transpose())
    }

    /// Direct sum with another algebroid over the same chart.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape("direct sum over different charts".into()));
        }
        let (r1, r2) = (self.rank, other.rank);
        let r = r1 + r2;
        let mut anchor = PolyMatrix::zeros(r, self.dim, self.dim);
        for i in 0..r1 {
            for mu in 0..self.dim {
                anchor.set(i, mu, self.anchor.get(i, mu).clone());
            }
        }
        for i in 0..r2 {
            for mu in 0..self.dim {
                anchor.set(r1 + i, mu, other.anchor.get(i, mu).clone());
            }
        }
        let mut structure = vec![Poly::zero(self.dim); r * r * r];
        for i in 0..r1 {
            for j in 0..r1 {
                for k in 0..r1 {
                    structure[(i * r + j) * r + k] = self.c(i, j, k).clone();
                }
            }
        }
        for i in 0..r2 {
            for j in 0..r2 {
                for k in 0..r2 {
                    structure[((r1 + i) * r + r1 + j) * r + r1 + k] = other.c(i, j, k).clone();
                }
            }
        }
        // Cross brackets [e_i, f_j] = a(e_i)(1) f_j - a(f_j)(1) e_i vanish on frames.
        Self::from_structure(self.dim, r, anchor, structure)
    }

    /// Shifts a structure function by `delta` keeping antisymmetry; used to corrupt presentations.
    pub fn perturb_structure(&self, i: usize, j: usize, k: usize, delta: &Poly) -> Result<Self> {
        if i == j {
            return Err(Error::Antisymmetry("diagonal structure function".into()));
        }
        let mut s = self.structure.clone();
        let r = self.rank;
        s[(i * r + j) * r + k] = &s[(i * r + j) * r + k] + delta;
        s[(j * r + i) * r + k] = &s[(j * r + i) * r + k] - delta;
        Self::from_structure(self.dim, r, self.anchor.clone(), s)
    }

    pub fn perturb_anchor(&self, i: usize, mu: usize, delta: &Poly) -> Result<Self> {
        let mut a = self.anchor.clone();
        a.set(i, mu, a.get(i, mu) + delta);
        Self::from_structure(self.dim, self.rank, a, self.structure.clone())
    }
}

/// A rank-1 algebroid whose frame element is sent to `v`; the bracket
/// `[f, g] = f·v(g) − g·v(f)` has vanishing structure function.
pub fn rank1_from_anchor(v: Vec<Poly>) -> Result<AlgebroidPresentation> {
    let n = v.len();
    if v.iter().any(|p| p.nvars() != n) {
        return Err(Error::Shape("vector field components in wrong variable count".into()));
    }
    AlgebroidPresentation::from_structure(n, 1, PolyMatrix::from_rows(n, vec![v]), vec![Poly::zero(n)])
}

/// `TU ⊕ g` with frame `(∂_1, …, ∂_n, g_1, …, g_r)`, anchor the projection to
/// `TU`, and `[(ξ,v),(ξ',v')] = ([ξ,ξ'] + v(ξ') − v'(ξ), [v,v'])`.
pub fn trivial_transitive(g: &AlgebroidPresentation, n: usize) -> Result<AlgebroidPresentation> {
    if g.dim() != 0 {
        return Err(Error::Shape("trivial_transitive expects a Lie algebra over a point".into()));
    }
    let r = g.rank();
    let total = n + r;
    let mut anchor = PolyMatrix::zeros(total, n, n);
    for mu in 0..n {
        anchor.set(mu, mu, Poly::one(n));
    }
    let mut structure = vec![Poly::zero(n); total * total * total];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                structure[((n + i) * total + n + j) * total + n + k] = g.c(i, j, k).embed(n, 0);
            }
        }
    }
    AlgebroidPresentation::from_structure(n, total, anchor, structure)
}

fn covector(a: &AlgebroidPresentation, m: usize) -> Form {
    let mut f = Form::zero(a.dim(), a.rank(), 1);
    f.set(vec![m], Poly::one(a.dim()));
    f
}

fn coordinate(a: &AlgebroidPresentation, mu: usize) -> Form {
    Form::function(a.rank(), Poly::var(a.dim(), mu))
}

/// Checks `d_A ∘ d_A = 0` on every coordinate function and frame covector.
pub fn verify_algebroid(a: &AlgebroidPresentation) -> Verdict {
    let r = a.rank();
    let gens = (0..a.dim())
        .map(|mu| (format!("x{}", mu + 1), coordinate(a, mu)))
        .chain((0..r).map(|m| (format!("e^{}", m + 1), covector(a, m))));
    for (name, g) in gens {
        if g.degree() + 2 > r {
            continue;
        }
        let dd = de_rham_d(a, &de_rham_d(a, &g).expect("below top degree")).expect("below top degree");
        if let Some((idx, p)) = dd.first_nonzero() {
            let on: Vec<String> = idx.iter().map(|i| format!("e{}", i + 1)).collect();
            return Verdict::Invalid(Witness::new(format!("d∘d({name}) on ({})", on.join(",")), p.clone()));
        }
    }
    Verdict::Valid
}

impl fmt::Display for AlgebroidPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "base {} rank {}", self.base(), self.rank)?;
        for i in 0..self.rank {
            let comps: Vec<String> = self.anchor_of(i).iter().map(ToString::to_string).collect();
            writeln!(f, "a(e{}) = ({})", i + 1, comps.join(", "))?;
        }
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                let terms: Vec<String> = (0..self.rank)
                    .filter(|&k| !self.c(i, j, k).is_zero())
                    .map(|k| format!("({})*e{}", self.c(i, j, k), k + 1))
                    .collect();
                if !terms.is_empty() {
                    writeln!(f, "[e{}, e{}] = {}", i + 1, j + 1, terms.join(" + "))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    fn sl2() -> AlgebroidPresentation {
        AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (2, 0, 1, int(1))]).unwrap()
    }

    #[test]
    fn lie_algebras_are_valid() {
        assert!(verify_algebroid(&sl2()).is_valid());
        assert!(verify_algebroid(&AlgebroidPresentation::tangent(3)).is_valid());
    }

    #[test]
    fn antisymmetry_enforced_on_load() {
        let r = AlgebroidPresentation::new(0, 1, PolyMatrix::zeros(1, 0, 0), vec![((0, 0), vec![Poly::one(0)])]);
        assert!(matches!(r, Err(Error::Antisymmetry(_))));
    }

    #[test]
    fn inconsistent_anchor_has_witness() {
        let dx = vec![Poly::one(1)];
        let anchor = PolyMatrix::from_rows(1, vec![dx.clone(), dx]);
        let a = AlgebroidPresentation::new(1, 2, anchor, vec![((0, 1), vec![Poly::one(1), Poly::zero(1)])]).unwrap();
        let w = verify_algebroid(&a).witness().cloned().expect("invalid");
        assert!(w.location.starts_with("d∘d(x1)"));
        assert_eq!(w.residue, Poly::from_int(1, -1));
    }

    #[test]
    fn non_jacobi_algebra_rejected() {
        // [e1,e2]=e3, [e1,e3]=e1 fails Jacobi.
        let bad = AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (0, 2, 0, int(1))]).unwrap();
        assert!(!verify_algebroid(&bad).is_valid());
    }

    #[test]
    fn frame_change_round_trip() {
        let x = Poly::var(1, 0);
        let a = trivial_transitive(&sl2(), 1).unwrap();
        let mut p = PolyMatrix::identity(4, 1);
        p.set(1, 0, x.clone());
        let mut pi = PolyMatrix::identity(4, 1);
        pi.set(1, 0, -&x);
        let b = a.change_frame(&p, &pi).unwrap();
        assert!(verify_algebroid(&b).is_valid());
        assert_eq!(b.change_frame(&pi, &p).unwrap(), a);
    }

    #[test]
    fn trivial_transitive_of_zero_algebra_is_tangent() {
        let g = AlgebroidPresentation::lie_algebra(0, &[]).unwrap();
        assert_eq!(trivial_transitive(&g, 2).unwrap(), AlgebroidPresentation::tangent(2));
        let h = trivial_transitive(&sl2(), 2).unwrap();
        assert_eq!(h.rank(), 5);
        assert!(verify_algebroid(&h).is_valid());
    }

    #[test]
    fn rank_one_algebroids_are_valid() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let a = rank1_from_anchor(vec![&x * &y, y.scale(&rat(1, 3))]).unwrap();
        assert!(verify_algebroid(&a).is_valid());
    }
}
