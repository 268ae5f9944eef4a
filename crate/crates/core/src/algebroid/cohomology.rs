use std::collections::HashMap;

use num_traits::Zero;

use super::forms::{de_rham_d, subsets, Form};
use super::AlgebroidPresentation;
use crate::exactalg::{Grade, GradedComplex, Poly, RatMatrix};
use crate::{Error, Result};

/// Integer weights on coordinates and on dual frame covectors `e^i`. A
/// monomial form `x^α e^I` has weight `Σ α_μ w_μ + Σ_{i∈I} ω_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub coord_weights: Vec<i64>,
    pub frame_weights: Vec<i64>,
}

impl Grading {
    /// Polynomial degree plus form degree.
    pub fn poly_form(dim: usize, rank: usize) -> Self {
        Grading { coord_weights: vec![1; dim], frame_weights: vec![1; rank] }
    }

    /// Polynomial degree only.
    pub fn poly(dim: usize, rank: usize) -> Self {
        Grading { coord_weights: vec![1; dim], frame_weights: vec![0; rank] }
    }

    pub fn named(name: &str, dim: usize, rank: usize) -> Result<Self> {
        match name {
            "poly-form" => Ok(Self::poly_form(dim, rank)),
            "poly" => Ok(Self::poly(dim, rank)),
            other => Err(Error::Invalid(format!("unknown grading {other:?}; known: poly-form, poly"))),
        }
    }

    /// Default used when none is requested: a single grade over a point,
    /// polynomial-plus-form degree otherwise.
    pub fn default_for(a: &AlgebroidPresentation) -> Self {
        if a.dim() == 0 {
            Self::poly(0, a.rank())
        } else {
            Self::poly_form(a.dim(), a.rank())
        }
    }

    pub fn check_shape(&self, dim: usize, rank: usize) -> Result<()> {
        if self.coord_weights.len() != dim || self.frame_weights.len() != rank {
            return Err(Error::Shape("grading weight counts".into()));
        }
        if self.coord_weights.iter().any(|&w| w <= 0) {
            return Err(Error::Grading("coordinate weights must be positive".into()));
        }
        Ok(())
    }

    pub fn frame_weight(&self, idx: &[usize]) -> i64 {
        idx.iter().map(|&i| self.frame_weights[i]).sum()
    }

    pub fn monomial_weight(&self, exps: &[u32]) -> i64 {
        exps.iter().zip(&self.coord_weights).map(|(&k, &w)| k as i64 * w).sum()
    }

    /// Lowest grade any form can have.
    pub fn min_grade(&self) -> i64 {
        self.frame_weights.iter().filter(|&&w| w < 0).sum()
    }
}

/// Exponent vectors of weight exactly `m` under positive weights.
pub(crate) fn monomials_of_weight(weights: &[i64], m: i64) -> Vec<Vec<u32>> {
    fn go(weights: &[i64], i: usize, left: i64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut k = 0;
        while k as i64 * weights[i] <= left {
            cur.push(k);
            go(weights, i + 1, left - k as i64 * weights[i], cur, out);
            cur.pop();
            k += 1;
        }
    }
    let mut out = Vec::new();
    if m >= 0 {
        go(weights, 0, m, &mut Vec::new(), &mut out);
    }
    out
}

/// Basis of the grade-`g` piece in form degree `k`: pairs `(I, α)`.
pub(crate) fn graded_basis(grading: &Grading, rank: usize, g: i64, k: usize) -> Vec<(Vec<usize>, Vec<u32>)> {
    let mut out = Vec::new();
    for idx in subsets(rank, k) {
        let rest = g - grading.frame_weight(&idx);
        for m in monomials_of_weight(&grading.coord_weights, rest) {
            out.push((idx.clone(), m));
        }
    }
    out
}

pub(crate) fn basis_form(nvars: usize, rank: usize, idx: &[usize], exps: &[u32]) -> Form {
    let mut f = Form::zero(nvars, rank, idx.len());
    f.set(idx.to_vec(), Poly::monomial(nvars, exps.to_vec(), num_traits::One::one()));
    f
}

/// Expresses a form in a graded basis; fails if some monomial has the wrong weight.
pub(crate) fn coordinates_in(
    w: &Form,
    index: &HashMap<(Vec<usize>, Vec<u32>), usize>,
    dim: usize,
    what: &dyn Fn() -> String,
) -> Result<Vec<(usize, crate::Rational)>> {
    let mut out = Vec::new();
    for (idx, p) in w.components() {
        for (e, c) in p.terms() {
            match index.get(&(idx.clone(), e.clone())) {
                Some(&pos) => out.push((pos, c.clone())),
                None => {
                    return Err(Error::Grading(format!(
                        "{} leaves its grade at monomial {} on e^{:?}",
                        what(),
                        Poly::monomial(p.nvars(), e.clone(), c.clone()),
                        idx.iter().map(|i| i + 1).collect::<Vec<_>>()
                    )))
                }
            }
        }
    }
    debug_assert!(out.iter().all(|(p, _)| *p < dim));
    Ok(out)
}

/// The Chevalley–Eilenberg complex of `A`, split into grades `min..=cap`.
pub fn graded_complex(a: &AlgebroidPresentation, grading: &Grading, cap: i64) -> Result<GradedComplex> {
    grading.check_shape(a.dim(), a.rank())?;
    let r = a.rank();
    let mut grades = Vec::new();
    for g in grading.min_grade()..=cap {
        let bases: Vec<_> = (0..=r).map(|k| graded_basis(grading, r, g, k)).collect();
        if bases.iter().all(Vec::is_empty) {
            continue;
        }
        let mut diffs = Vec::with_capacity(r);
        for k in 0..r {
            let index: HashMap<_, _> = bases[k + 1].iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
            let mut m = RatMatrix::zeros(bases[k + 1].len(), bases[k].len());
            for (col, (idx, exps)) in bases[k].iter().enumerate() {
                let img = de_rham_d(a, &basis_form(a.dim(), r, idx, exps))?;
                let what = || format!("d on grade {g}, degree {k}");
                for (row, c) in coordinates_in(&img, &index, bases[k + 1].len(), &what)? {
                    if !c.is_zero() {
                        m.set(row, col, c);
                    }
                }
            }
            diffs.push(m);
        }
        let dims = bases.iter().map(Vec::len).collect();
        grades.push(Grade::new(g, dims, diffs)?);
    }
    Ok(GradedComplex::new(grades))
}

/// Betti numbers of the algebroid complex per grade up to `cap`.
pub fn algebroid_cohomology(a: &AlgebroidPresentation, grading: &Grading, cap: i64) -> Result<Vec<(i64, Vec<usize>)>> {
    graded_complex(a, grading, cap)?.cohomology()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    #[test]
    fn ce_of_lie_algebras() {
        let sl2 = AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (2, 0, 1, int(1))]).unwrap();
        let heis = AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1))]).unwrap();
        let ab = AlgebroidPresentation::abelian(0, 3);
        for (a, want) in [(sl2, vec![1, 0, 0, 1]), (heis, vec![1, 2, 2, 1]), (ab, vec![1, 3, 3, 1])] {
            let g = Grading::default_for(&a);
            assert_eq!(algebroid_cohomology(&a, &g, 0).unwrap(), vec![(0, want)]);
        }
    }

    #[test]
    fn tangent_line_is_acyclic_above_grade_zero() {
        let a = AlgebroidPresentation::tangent(1);
        let b = algebroid_cohomology(&a, &Grading::poly_form(1, 1), 4).unwrap();
        assert_eq!(b[0], (0, vec![1, 0]));
        assert!(b[1..].iter().all(|(_, v)| v == &vec![0, 0]));
    }

    #[test]
    fn grading_violation_is_reported() {
        let x = Poly::var(1, 0);
        let a = super::super::rank1_from_anchor(vec![x.pow(2)]).unwrap();
        assert!(matches!(graded_complex(&a, &Grading::poly_form(1, 1), 2), Err(Error::Grading(_))));
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_of_weight(&[1, 2], 3).len(), 2);
        assert_eq!(monomials_of_weight(&[1, 1, 1], 2).len(), 6);
    }
}
