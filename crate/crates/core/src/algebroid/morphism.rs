use super::presentation::apply_vector;
use super::AlgebroidPresentation;
use crate::exactalg::{Poly, PolyMatrix};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

/// For each source frame element `e_i`, terms `g ⊗ η` with `g` a function on
/// the source chart and `η` a target section in target coordinates, so that
/// `φ'(e_i) = Σ g ⊗ η` in `Γ(f*B) = C(X) ⊗_{C(Y)} Γ(B)`.
pub type Decomposition = Vec<Vec<(Poly, Vec<Poly>)>>;

/// A frame-level morphism `A → B` covering `f: X → Y`.
///
/// `matrix` is `rank A × rank B` over the source chart: row `i` expresses
/// `φ'(e_i)` in the pulled-back frame of `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphismData {
    pub source: AlgebroidPresentation,
    pub target: AlgebroidPresentation,
    pub base_map: Vec<Poly>,
    pub matrix: PolyMatrix,
    pub decomposition: Option<Decomposition>,
}

fn flatten_term(g: &Poly, eta: &[Poly], base_map: &[Poly]) -> Vec<Poly> {
    eta.iter().map(|c| g * &pull(c, base_map, g.nvars())).collect()
}

fn flatten(terms: &[(Poly, Vec<Poly>)], base_map: &[Poly], nvars: usize, rank: usize) -> Vec<Poly> {
    let mut out = vec![Poly::zero(nvars); rank];
    for (g, eta) in terms {
        for (o, t) in out.iter_mut().zip(flatten_term(g, eta, base_map)) {
            *o = &*o + &t;
        }
    }
    out
}

impl MorphismData {
    pub fn new(
        source: AlgebroidPresentation,
        target: AlgebroidPresentation,
        base_map: Vec<Poly>,
        matrix: PolyMatrix,
    ) -> Result<Self> {
        let n = source.dim();
        if base_map.len() != target.dim() || base_map.iter().any(|p| p.nvars() != n) {
            return Err(Error::Shape(format!(
                "base map needs {} components in {} variables",
                target.dim(),
                n
            )));
        }
        if matrix.rows() != source.rank() || matrix.cols() != target.rank() || matrix.nvars() != n {
            return Err(Error::Shape(format!(
                "bundle map is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                source.rank(),
                target.rank()
            )));
        }
        Ok(MorphismData { source, target, base_map, matrix, decomposition: None })
    }

    /// A base-preserving morphism over a common chart.
    pub fn over_identity(source: AlgebroidPresentation, target: AlgebroidPresentation, matrix: PolyMatrix) -> Result<Self> {
        if source.dim() != target.dim() {
            return Err(Error::Shape("base-preserving morphism between different charts".into()));
        }
        let n = source.dim();
        let id = (0..n).map(|i| Poly::var(n, i)).collect();
        Self::new(source, target, id, matrix)
    }

    pub fn identity(a: &AlgebroidPresentation) -> Self {
        Self::over_identity(a.clone(), a.clone(), PolyMatrix::identity(a.rank(), a.dim())).expect("identity")
    }

    /// Attaches a tensor decomposition; it must flatten to `matrix`.
    pub fn with_decomposition(mut self, d: Decomposition) -> Result<Self> {
        if d.len() != self.source.rank() {
            return Err(Error::Shape("decomposition needs one entry per source frame element".into()));
        }
        for (i, terms) in d.iter().enumerate() {
            if terms.iter().any(|(g, eta)| {
                g.nvars() != self.source.dim()
                    || eta.len() != self.target.rank()
                    || eta.iter().any(|p| p.nvars() != self.target.dim())
            }) {
                return Err(Error::Shape(format!("decomposition of e{} has malformed terms", i + 1)));
            }
            let flat = flatten(terms, &self.base_map, self.source.dim(), self.target.rank());
            if flat != self.matrix.row_vec(i) {
                return Err(Error::Invalid(format!("decomposition of e{} disagrees with the bundle map", i + 1)));
            }
        }
        self.decomposition = Some(d);
        Ok(self)
    }

    /// The decomposition along the target frame: `Σ_b φ_{ib} ⊗ e'_b`.
    pub fn canonical_decomposition(&self) -> Decomposition {
        let (m, q) = (self.target.dim(), self.target.rank());
        (0..self.source.rank())
            .map(|i| {
                (0..q)
                    .map(|b| {
                        let unit = (0..q).map(|c| if c == b { Poly::one(m) } else { Poly::zero(m) }).collect();
                        (self.matrix.get(i, b).clone(), unit)
                    })
                    .filter(|(g, _)| !g.is_zero())
                    .collect()
            })
            .collect()
    }

    pub fn covers_identity(&self) -> bool {
        self.source.dim() == self.target.dim()
            && self.base_map.iter().enumerate().all(|(i, p)| *p == Poly::var(self.source.dim(), i))
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &MorphismData) -> Result<MorphismData> {
        if self.target != after.source {
            return Err(Error::Shape("composing morphisms with mismatched middle algebroid".into()));
        }
        let n = self.source.dim();
        let base_map: Vec<Poly> = after.base_map.iter().map(|p| pull(p, &self.base_map, n)).collect();
        let pulled = after.matrix.substitute_or_constant(&self.base_map, self.source.dim());
        MorphismData::new(self.source.clone(), after.target.clone(), base_map, self.matrix.mul(&pulled))
    }

    /// Inverse of a base-preserving isomorphism.
    pub fn inverse(&self) -> Result<MorphismData> {
        if !self.covers_identity() {
            return Err(Error::Unsupported("inverse of a base-changing morphism".into()));
        }
        MorphismData::over_identity(self.target.clone(), self.source.clone(), self.matrix.inverse()?)
    }
}

impl PolyMatrix {
    /// Substitution that also handles matrices over a point (zero variables).
    pub fn substitute_or_constant(&self, images: &[Poly], nvars: usize) -> PolyMatrix {
        if self.nvars() == 0 {
            self.map(nvars, |p| Poly::constant(nvars, p.constant_term()))
        } else {
            self.substitute(images)
        }
    }
}

pub(crate) fn pull(p: &Poly, base_map: &[Poly], nvars: usize) -> Poly {
    if p.nvars() == 0 {
        Poly::constant(nvars, p.constant_term())
    } else {
        p.substitute(base_map)
    }
}

/// Checks the anchor condition `b∘φ = f_*∘a` and the bracket condition
/// `φ'[ξ,ν] = Σ g_i h_j ⊗ [ξ'_i,ν'_j] + Σ ξ(h_j) ⊗ ν'_j − Σ ν(g_i) ⊗ ξ'_i`
/// on all frame pairs, using the stored decomposition verbatim.
pub fn check_morphism(m: &MorphismData) -> Verdict {
    let (a, b) = (&m.source, &m.target);
    let (n, q) = (a.dim(), b.rank());
    let f = &m.base_map;
    for i in 0..a.rank() {
        for nu in 0..b.dim() {
            let mut lhs = Poly::zero(n);
            for c in 0..q {
                let mc = m.matrix.get(i, c);
                if !mc.is_zero() {
                    lhs = lhs + mc * &pull(b.anchor().get(c, nu), f, n);
                }
            }
            let rhs = apply_vector(a.anchor_of(i), &f[nu]);
            let res = lhs - rhs;
            if !res.is_zero() {
                return Verdict::Invalid(Witness::new(format!("anchor on e{}, component {}", i + 1, nu + 1), res));
            }
        }
    }
    let owned;
    let dec = match &m.decomposition {
        Some(d) => d,
        None => {
            owned = m.canonical_decomposition();
            &owned
        }
    };
    let pull_section = |eta: &[Poly]| -> Vec<Poly> { eta.iter().map(|p| pull(p, f, n)).collect() };
    for i in 0..a.rank() {
        for j in i + 1..a.rank() {
            let mut lhs = vec![Poly::zero(n); q];
            for k in 0..a.rank() {
                let c = a.c(i, j, k);
                if c.is_zero() {
                    continue;
                }
                for (l, x) in lhs.iter_mut().zip(m.matrix.row(k)) {
                    *l = &*l + &(c * x);
                }
            }
            let mut rhs = vec![Poly::zero(n); q];
            let add = |rhs: &mut Vec<Poly>, coef: &Poly, sec: &[Poly]| {
                if coef.is_zero() {
                    return;
                }
                for (r, s) in rhs.iter_mut().zip(sec) {
                    if !s.is_zero() {
                        *r = &*r + &(coef * s);
                    }
                }
            };
            for (g, xi) in &dec[i] {
                for (h, nu) in &dec[j] {
                    let br = b.bracket(xi, nu);
                    add(&mut rhs, &(g * h), &pull_section(&br));
                }
            }
            for (h, nu) in &dec[j] {
                add(&mut rhs, &a.act(i, h), &pull_section(nu));
            }
            for (g, xi) in &dec[i] {
                add(&mut rhs, &-a.act(j, g), &pull_section(xi));
            }
            for (k, (l, r)) in lhs.iter().zip(&rhs).enumerate() {
                let res = l - r;
                if !res.is_zero() {
                    return Verdict::Invalid(Witness::new(
                        format!("bracket of (e{}, e{}), target component {}", i + 1, j + 1, k + 1),
                        res,
                    ));
                }
            }
        }
    }
    Verdict::Valid
}
