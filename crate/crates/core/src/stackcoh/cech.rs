use std::collections::HashMap;

use num_traits::Zero;

use super::nerve::{build_nerve, NerveData};
use crate::algebroid::{basis_form, coordinates_in, de_rham_d, graded_basis, Form, Grading};
use crate::exactalg::{DoubleComplex, Poly, RatMatrix, TotalBetti};
use crate::groupoid::{verify_groupoid_algebroid, GroupoidAlgebroid};
use crate::{Error, Result};

pub(crate) type Basis = Vec<(Vec<usize>, Vec<u32>)>;

/// `g·ω` at `y`: the form `ω(g⁻¹y)` transported along `ψ_{g⁻¹}(y): A_y → A_{g⁻¹y}`.
pub fn transport_form(ga: &GroupoidAlgebroid, g: usize, w: &Form) -> Form {
    let (n, r) = (ga.algebroid.dim(), ga.algebroid.rank());
    let gi = ga.groupoid.group().inverse(g);
    let p = &ga.psi[gi];
    let moved = w.substitute(&ga.groupoid.act_inv(g));
    let pulled: Vec<Form> = (0..r)
        .map(|i| {
            let mut f = Form::zero(n, r, 1);
            for j in 0..r {
                f.set(vec![j], p.get(j, i).clone());
            }
            f
        })
        .collect();
    let mut out = Form::zero(n, r, w.degree());
    for (idx, c) in moved.components() {
        let mut term = Form::function(r, c.clone());
        for &i in idx {
            term = term.wedge(&pulled[i]);
        }
        out = out.add(&term);
    }
    out
}

fn index_of(basis: &Basis) -> HashMap<(Vec<usize>, Vec<u32>), usize> {
    basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect()
}

/// Matrix of `ω ↦ g·ω` on one graded piece, columns indexed by `basis`.
pub(crate) fn action_matrix(ga: &GroupoidAlgebroid, g: usize, basis: &Basis, grade: i64, k: usize) -> Result<RatMatrix> {
    let (n, r) = (ga.algebroid.dim(), ga.algebroid.rank());
    let index = index_of(basis);
    let mut m = RatMatrix::zeros(basis.len(), basis.len());
    for (col, (idx, exps)) in basis.iter().enumerate() {
        let img = transport_form(ga, g, &basis_form(n, r, idx, exps));
        let what = || format!("the action of g{} on grade {grade}, degree {k}", g + 1);
        for (row, c) in coordinates_in(&img, &index, basis.len(), &what)? {
            m.add_at(row, col, &c);
        }
    }
    Ok(m)
}

/// Matrix of `d_A` from degree `k` to `k + 1` on one grade.
pub(crate) fn d_matrix(ga: &GroupoidAlgebroid, src: &Basis, dst: &Basis, grade: i64, k: usize) -> Result<RatMatrix> {
    let a = &ga.algebroid;
    let index = index_of(dst);
    let mut m = RatMatrix::zeros(dst.len(), src.len());
    if k >= a.rank() {
        return Ok(m);
    }
    for (col, (idx, exps)) in src.iter().enumerate() {
        let img = de_rham_d(a, &basis_form(a.dim(), a.rank(), idx, exps))?;
        let what = || format!("d on grade {grade}, degree {k}");
        for (row, c) in coordinates_in(&img, &index, dst.len(), &what)? {
            m.add_at(row, col, &c);
        }
    }
    Ok(m)
}

/// One grade of the Čech double complex: piece `(n, k)` is `Ω^k` of the
/// grade over `X_n`, with `d_A` horizontally and `Σ (−1)^i d_i^*` vertically.
#[derive(Clone, Debug, PartialEq)]
pub struct CechDoubleComplex {
    pub grade: i64,
    pub complex: DoubleComplex,
    pub nerve: NerveData,
    pub bases: Vec<Basis>,
    pub provenance: Vec<String>,
}

pub fn build_cech_complex(ga: &GroupoidAlgebroid, top_row: usize, top_col: usize, grading: &Grading, grade: i64) -> Result<CechDoubleComplex> {
    if !verify_groupoid_algebroid(ga)?.is_valid() {
        return Err(Error::Invalid("groupoid algebroid does not verify".into()));
    }
    let a = &ga.algebroid;
    grading.check_shape(a.dim(), a.rank())?;
    let nerve = build_nerve(&ga.groupoid, top_row)?;
    let bases: Vec<Basis> = (0..=top_col).map(|k| graded_basis(grading, a.rank(), grade, k)).collect();
    let order = ga.groupoid.order();
    let actions: Vec<Vec<RatMatrix>> = (0..=top_col)
        .map(|k| (0..order).map(|g| action_matrix(ga, g, &bases[k], grade, k)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let ds: Vec<RatMatrix> = (0..top_col).map(|k| d_matrix(ga, &bases[k], &bases[k + 1], grade, k)).collect::<Result<_>>()?;

    let dims: Vec<Vec<usize>> =
        (0..=top_row).map(|n| (0..=top_col).map(|k| nerve.levels[n].len() * bases[k].len()).collect()).collect();
    let horizontal: Vec<Vec<RatMatrix>> = (0..=top_row)
        .map(|n| {
            (0..top_col)
                .map(|k| {
                    let (bs, bt) = (bases[k].len(), bases[k + 1].len());
                    let mut m = RatMatrix::zeros(dims[n][k + 1], dims[n][k]);
                    for t in 0..nerve.levels[n].len() {
                        for i in 0..bt {
                            for j in 0..bs {
                                let v = ds[k].get(i, j);
                                if !v.is_zero() {
                                    m.set(t * bt + i, t * bs + j, v.clone());
                                }
                            }
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    let vertical: Vec<Vec<RatMatrix>> = (0..top_row)
        .map(|n| {
            (0..=top_col)
                .map(|k| {
                    let b = bases[k].len();
                    let mut m = RatMatrix::zeros(dims[n + 1][k], dims[n][k]);
                    for (s, sigma) in nerve.levels[n + 1].iter().enumerate() {
                        for i in 0..=n + 1 {
                            let face = nerve.face(sigma, i);
                            let t = nerve.index_of(&face.tuple);
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            for col in 0..b {
                                for row in 0..b {
                                    let v = if i == 0 {
                                        actions[k][sigma[0]].get(row, col).clone()
                                    } else if row == col {
                                        crate::exactalg::int(1)
                                    } else {
                                        continue;
                                    };
                                    if !v.is_zero() {
                                        m.add_at(s * b + row, t * b + col, &(v * crate::exactalg::int(sign)));
                                    }
                                }
                            }
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    let complex = DoubleComplex::new(dims, horizontal, vertical)?;
    let provenance = vec![
        "d_0 transports along ψ_{g₁⁻¹} and moves the chart by l_{g₁}⁻¹".to_string(),
        "d_i for 0 < i < n composes g_i g_{i+1} on the same chart".to_string(),
        "d_n drops the last arrow on the same chart".to_string(),
    ];
    Ok(CechDoubleComplex { grade, complex, nerve, bases, provenance })
}

/// All grades from the lowest up to `cap` that have any forms.
pub fn build_cech_complexes(ga: &GroupoidAlgebroid, top_row: usize, top_col: usize, grading: &Grading, cap: i64) -> Result<Vec<CechDoubleComplex>> {
    let r = ga.algebroid.rank();
    let mut out = Vec::new();
    for g in grading.min_grade()..=cap {
        if (0..=r.min(top_col)).all(|k| graded_basis(grading, r, g, k).is_empty()) {
            continue;
        }
        out.push(build_cech_complex(ga, top_row, top_col, grading, g)?);
    }
    Ok(out)
}

/// Total cohomology in degrees `0..=max_degree` per grade, truncated at
/// `N = K = max_degree + 1` so that every reported degree is reliable.
pub fn cech_cohomology(ga: &GroupoidAlgebroid, grading: &Grading, cap: i64, max_degree: usize) -> Result<Vec<(i64, TotalBetti)>> {
    let top = max_degree + 1;
    build_cech_complexes(ga, top, top, grading, cap)?
        .into_iter()
        .map(|c| Ok((c.grade, c.complex.total_cohomology(max_degree)?)))
        .collect()
}

/// The bar complex of `G` with coefficients in the grade-`grade` functions on
/// the chart, built directly from the formula
/// `(δf)(g_1…g_{n+1})(y) = f(g_2…)(g_1⁻¹y) + Σ (−1)^i f(…g_i g_{i+1}…)(y) + (−1)^{n+1} f(g_1…g_n)(y)`.
pub fn group_cochain_complex(ga: &GroupoidAlgebroid, grading: &Grading, grade: i64, top: usize) -> Result<Vec<RatMatrix>> {
    let g = &ga.groupoid;
    let grp = g.group();
    let order = grp.order();
    let n = g.dim();
    let monos = crate::algebroid::monomials_of_weight(&grading.coord_weights, grade - grading.frame_weight(&[]));
    let index: HashMap<Vec<u32>, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let b = monos.len();
    let pow = |k: usize| order.pow(k as u32);
    let mut out = Vec::new();
    for level in 0..top {
        let mut m = RatMatrix::zeros(pow(level + 1) * b, pow(level) * b);
        for s in 0..pow(level + 1) {
            let digits: Vec<usize> = (0..=level).rev().map(|p| (s / order.pow(p as u32)) % order).collect();
            let encode = |t: &[usize]| t.iter().fold(0, |acc, &x| acc * order + x);
            for (col, mono) in monos.iter().enumerate() {
                let f = Poly::monomial(n, mono.clone(), crate::exactalg::int(1));
                let moved = if n == 0 { f.clone() } else { f.substitute(&g.act(grp.inverse(digits[0]))) };
                let mut add = |t: usize, p: &Poly, sign: i64| -> Result<()> {
                    for (e, c) in p.terms() {
                        let row = *index.get(e).ok_or_else(|| Error::Grading(format!("the action moves {p} out of grade {grade}")))?;
                        m.add_at(s * b + row, t * b + col, &(c * crate::exactalg::int(sign)));
                    }
                    Ok(())
                };
                add(encode(&digits[1..]), &moved, 1)?;
                for i in 1..=level {
                    let mut t = digits[..i - 1].to_vec();
                    t.push(grp.mul(digits[i - 1], digits[i]));
                    t.extend_from_slice(&digits[i + 1..]);
                    add(encode(&t), &f, if i % 2 == 0 { 1 } else { -1 })?;
                }
                add(encode(&digits[..level]), &f, if (level + 1) % 2 == 0 { 1 } else { -1 })?;
            }
        }
        out.push(m);
    }
    Ok(out)
}

impl CechDoubleComplex {
    /// Vertical differentials of column 0.
    pub fn column_zero(&self) -> Vec<RatMatrix> {
        (0..self.complex.max_row()).map(|n| self.complex.vertical(n, 0).clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::AlgebroidPresentation;
    use crate::exactalg::{int, PolyMatrix};
    use crate::groupoid::{DeskGroupoid, FiniteGroup};

    pub(crate) fn sign_line() -> GroupoidAlgebroid {
        let g = DeskGroupoid::over_point(FiniteGroup::cyclic(2));
        let psi = vec![PolyMatrix::identity(1, 0), PolyMatrix::from_rows(0, vec![vec![Poly::from_int(0, -1)]])];
        GroupoidAlgebroid::new(g, AlgebroidPresentation::abelian(0, 1), psi).unwrap()
    }

    pub(crate) fn swap_plane() -> GroupoidAlgebroid {
        let g = DeskGroupoid::over_point(FiniteGroup::cyclic(2));
        let swap = PolyMatrix::from_constants(&RatMatrix::from_ints(&[&[0, 1], &[1, 0]]), 0);
        GroupoidAlgebroid::new(g, AlgebroidPresentation::abelian(0, 2), vec![PolyMatrix::identity(2, 0), swap]).unwrap()
    }

    #[test]
    fn piece_dimensions() {
        let c = build_cech_complex(&sign_line(), 3, 3, &Grading::poly(0, 1), 0).unwrap();
        assert_eq!((0..=3).map(|n| c.complex.dim(n, 1)).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
        let s = build_cech_complex(&swap_plane(), 2, 2, &Grading::poly(0, 2), 0).unwrap();
        assert_eq!((0..=2).map(|k| s.complex.dim(2, k)).collect::<Vec<_>>(), vec![4, 8, 4]);
    }

    #[test]
    fn sign_line_total_cohomology() {
        let b = cech_cohomology(&sign_line(), &Grading::poly(0, 1), 0, 3).unwrap();
        assert_eq!(b[0].1.betti, vec![1, 0, 0, 0]);
        assert!(b[0].1.reliable.iter().all(|&r| r));
    }

    #[test]
    fn trivial_group_is_the_ce_complex() {
        let so3 = AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (2, 0, 1, int(1))]).unwrap();
        let ga = GroupoidAlgebroid::trivial(DeskGroupoid::over_point(FiniteGroup::trivial()), so3).unwrap();
        let b = cech_cohomology(&ga, &Grading::poly(0, 3), 0, 3).unwrap();
        assert_eq!(b[0].1.betti, vec![1, 0, 0, 1]);
    }

    #[test]
    fn column_zero_is_the_bar_complex() {
        let ga = swap_plane();
        let c = build_cech_complex(&ga, 3, 2, &Grading::poly(0, 2), 0).unwrap();
        assert_eq!(c.column_zero(), group_cochain_complex(&ga, &Grading::poly(0, 2), 0, 3).unwrap());
    }

    #[test]
    fn affine_offsets_break_the_grading() {
        use crate::pullback::AffineMap;
        let shift = AffineMap::new(RatMatrix::from_ints(&[&[-1]]), vec![int(1)]).unwrap();
        let id = AffineMap::identity(1);
        let g = DeskGroupoid::transformation(FiniteGroup::cyclic(2), 1, vec![id.clone(), shift.clone()], vec![id, shift]).unwrap();
        let minus = PolyMatrix::from_rows(1, vec![vec![Poly::from_int(1, -1)]]);
        let ga = GroupoidAlgebroid::new(g, AlgebroidPresentation::tangent(1), vec![PolyMatrix::identity(1, 1), minus]).unwrap();
        assert!(matches!(build_cech_complex(&ga, 2, 1, &Grading::poly_form(1, 1), 1), Err(Error::Grading(_))));
    }
}
