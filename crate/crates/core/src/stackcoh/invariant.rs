use num_traits::Zero;

use super::cech::{action_matrix, cech_cohomology, d_matrix, Basis};
use crate::algebroid::{graded_basis, Grading};
use crate::exactalg::{Grade, GradedComplex, RatMatrix, Rational};
use crate::groupoid::{verify_groupoid_algebroid, GroupoidAlgebroid};
use crate::{Error, Result};

fn columns(vectors: &[Vec<Rational>], rows: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(rows, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            if !x.is_zero() {
                m.set(i, j, x.clone());
            }
        }
    }
    m
}

/// Forms fixed by every `g`, as the kernel of the stacked `T_g − I`.
fn invariants(ga: &GroupoidAlgebroid, basis: &Basis, grade: i64, k: usize) -> Result<RatMatrix> {
    let size = basis.len();
    let blocks = (0..ga.groupoid.order())
        .map(|g| action_matrix(ga, g, basis, grade, k)?.sub(&RatMatrix::identity(size)))
        .collect::<Result<Vec<_>>>()?;
    let stacked = RatMatrix::vstack(&blocks)?;
    Ok(columns(&stacked.kernel_basis(), size))
}

/// The subcomplex of `ψ`-invariant forms, per grade up to `cap`, in the basis
/// of invariant vectors. Closure under `d_A` is checked by solving for the
/// restricted differential.
pub fn invariant_complex(ga: &GroupoidAlgebroid, grading: &Grading, cap: i64) -> Result<GradedComplex> {
    if !verify_groupoid_algebroid(ga)?.is_valid() {
        return Err(Error::Invalid("groupoid algebroid does not verify".into()));
    }
    let r = ga.algebroid.rank();
    grading.check_shape(ga.algebroid.dim(), r)?;
    let mut grades = Vec::new();
    for g in grading.min_grade()..=cap {
        let bases: Vec<Basis> = (0..=r).map(|k| graded_basis(grading, r, g, k)).collect();
        if bases.iter().all(Vec::is_empty) {
            continue;
        }
        let inv: Vec<RatMatrix> = (0..=r).map(|k| invariants(ga, &bases[k], g, k)).collect::<Result<_>>()?;
        let mut diffs = Vec::with_capacity(r);
        for k in 0..r {
            let d = d_matrix(ga, &bases[k], &bases[k + 1], g, k)?;
            let image = d.mul(&inv[k])?;
            let mut restricted = RatMatrix::zeros(inv[k + 1].cols(), inv[k].cols());
            for j in 0..image.cols() {
                let x = inv[k + 1].solve(&image.column(j)).ok_or_else(|| {
                    Error::Inconsistent(format!("d maps an invariant form out of the invariants at grade {g}, degree {k}"))
                })?;
                for (i, v) in x.into_iter().enumerate() {
                    if !v.is_zero() {
                        restricted.set(i, j, v);
                    }
                }
            }
            diffs.push(restricted);
        }
        let dims = inv.iter().map(RatMatrix::cols).collect();
        grades.push(Grade::new(g, dims, diffs)?);
    }
    Ok(GradedComplex::new(grades))
}

/// Total Čech cohomology against invariant cohomology, grade by grade, in the
/// reliable degrees `0..=max_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyComparison {
    pub rows: Vec<(i64, Vec<usize>, Vec<usize>)>,
    pub equal: bool,
}

pub fn compare_total_vs_invariants(ga: &GroupoidAlgebroid, grading: &Grading, cap: i64, max_degree: usize) -> Result<CohomologyComparison> {
    let total = cech_cohomology(ga, grading, cap, max_degree)?;
    let invariant = invariant_complex(ga, grading, cap)?.cohomology()?;
    let mut rows = Vec::new();
    let mut equal = true;
    for (g, tb) in total {
        let lhs = tb.reliable_prefix().to_vec();
        let mut rhs = invariant.iter().find(|(h, _)| *h == g).map(|(_, b)| b.clone()).unwrap_or_default();
        rhs.resize(lhs.len(), 0);
        equal &= lhs == rhs;
        rows.push((g, lhs, rhs));
    }
    Ok(CohomologyComparison { rows, equal })
}
