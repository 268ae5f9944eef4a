use std::collections::HashMap;

use super::polyvector::PolyVectorField;
use super::structure::{cotangent_algebroid, PoissonStructure};
use crate::algebroid::{
    basis_form, check_morphism, coordinates_in, de_rham_d, graded_basis, graded_complex, AlgebroidPresentation, Form,
    Grading, MorphismData,
};
use crate::exactalg::{Poly, PolyMatrix, RatMatrix};
use crate::verdict::first_failure;
use crate::{Error, Result, Verdict};

/// `Π♯: T*_Π → T` with its inverse `ω♭`, both checked as algebroid morphisms.
#[derive(Clone, Debug, PartialEq)]
pub struct AnchorIsoCertificate {
    pub anchor: MorphismData,
    pub inverse: MorphismData,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticPoisson {
    pub omega: PolyMatrix,
    pub poisson: PoissonStructure,
    pub cotangent: AlgebroidPresentation,
    pub certificate: AnchorIsoCertificate,
}

fn identity_residue(m: &PolyMatrix, what: &str) -> Result<()> {
    let diff = m.sub(&PolyMatrix::identity(m.rows(), m.nvars()));
    match diff.first_nonzero() {
        None => Ok(()),
        Some((i, j, p)) => Err(Error::BadInverse(format!("{what} at ({}, {}) differs from the identity by {p}", i + 1, j + 1))),
    }
}

/// `ω = Σ_{i<j} ω_{ij} dx_i∧dx_j` given by its antisymmetric matrix, with a
/// supplied inverse. With `ω♭(∂_i) = Σ_j ω_{ij} dx_j` and `Π♯ = (ω♭)⁻¹`, the
/// bivector matrix is the supplied inverse itself.
pub fn symplectic_to_poisson(omega: &PolyMatrix, omega_inv: &PolyMatrix) -> Result<SymplecticPoisson> {
    let n = omega.rows();
    PolyVectorField::bivector_from_matrix(omega)?;
    if omega_inv.rows() != n || omega_inv.cols() != n || omega_inv.nvars() != n {
        return Err(Error::Shape("inverse of ω has the wrong shape".into()));
    }
    identity_residue(&omega.mul(omega_inv), "ω·ω⁻¹")?;
    identity_residue(&omega_inv.mul(omega), "ω⁻¹·ω")?;

    let tangent = AlgebroidPresentation::tangent(n);
    let mut form = Form::zero(n, n, 2);
    for i in 0..n {
        for j in i + 1..n {
            form.set(vec![i, j], omega.get(i, j).clone());
        }
    }
    if n > 2 {
        let d = de_rham_d(&tangent, &form)?;
        if let Some((idx, p)) = d.first_nonzero() {
            let at = idx.iter().map(|i| format!("dx{}", i + 1)).collect::<Vec<_>>().join("∧");
            return Err(Error::Invalid(format!("ω is not closed: dω has {p} on {at}")));
        }
    }

    let poisson = PoissonStructure::new(PolyVectorField::bivector_from_matrix(omega_inv)?)?;
    let cotangent = cotangent_algebroid(&poisson);
    let anchor = MorphismData::over_identity(cotangent.clone(), tangent.clone(), omega_inv.clone())?;
    let inverse = MorphismData::over_identity(tangent, cotangent.clone(), omega.clone())?;
    let verdict = first_failure([check_morphism(&anchor), check_morphism(&inverse)]);
    Ok(SymplecticPoisson {
        omega: omega.clone(),
        poisson,
        cotangent,
        certificate: AnchorIsoCertificate { anchor, inverse, verdict },
    })
}

/// `φ*` on forms for a morphism over the identity with matrix `m`:
/// `φ*(e^a) = Σ_i m_{ia} f^i`.
fn pull_form(m: &PolyMatrix, w: &Form) -> Form {
    let (n, r) = (m.nvars(), m.rows());
    let covectors: Vec<Form> = (0..m.cols())
        .map(|a| {
            let mut f = Form::zero(n, r, 1);
            for i in 0..r {
                f.set(vec![i], m.get(i, a).clone());
            }
            f
        })
        .collect();
    let mut out = Form::zero(n, r, w.degree());
    for (idx, c) in w.components() {
        let mut term = Form::function(r, c.clone());
        for &a in idx {
            term = term.wedge(&covectors[a]);
        }
        out = out.add(&term);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportReport {
    /// Grade, Betti numbers of `T*_Π`, Betti numbers of `T`.
    pub rows: Vec<(i64, Vec<usize>, Vec<usize>)>,
    pub commutes: Verdict,
    pub isomorphism: bool,
    pub equal: bool,
}

/// The anchor-induced cochain map `Ω(T) → Ω(T*_Π)` per grade up to `cap`:
/// commutation with both differentials, invertibility of every block, and
/// the Betti numbers on both sides.
pub fn transport_cohomology(sp: &SymplecticPoisson, grading: &Grading, cap: i64) -> Result<TransportReport> {
    let n = sp.cotangent.dim();
    let tangent = AlgebroidPresentation::tangent(n);
    let ct = graded_complex(&tangent, grading, cap)?;
    let cc = graded_complex(&sp.cotangent, grading, cap)?;
    let matrix = &sp.certificate.anchor.matrix;
    let mut checks = Vec::new();
    let mut isomorphism = true;
    let mut rows = Vec::new();
    let mut equal = true;
    for (gt, gc) in ct.grades.iter().zip(&cc.grades) {
        if gt.label != gc.label || gt.dims != gc.dims {
            return Err(Error::Inconsistent(format!("graded pieces differ at grade {}", gt.label)));
        }
        let g = gt.label;
        let maps: Vec<RatMatrix> = (0..=n)
            .map(|k| {
                let basis = graded_basis(grading, n, g, k);
                let index: HashMap<_, _> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
                let mut m = RatMatrix::zeros(basis.len(), basis.len());
                for (col, (idx, exps)) in basis.iter().enumerate() {
                    let img = pull_form(matrix, &basis_form(n, n, idx, exps));
                    let what = || format!("the anchor pullback on grade {g}, degree {k}");
                    for (row, c) in coordinates_in(&img, &index, basis.len(), &what)? {
                        m.add_at(row, col, &c);
                    }
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;
        isomorphism &= maps.iter().all(|m| m.rank() == m.rows());
        for k in 0..n {
            let lhs = maps[k + 1].mul(&gt.differentials[k])?;
            let rhs = gc.differentials[k].mul(&maps[k])?;
            let diff = lhs.sub(&rhs)?;
            let witness = (0..diff.rows())
                .flat_map(|i| (0..diff.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| !num_traits::Zero::is_zero(diff.get(i, j)));
            if let Some((i, j)) = witness {
                checks.push(Verdict::from_residue(
                    format!("φ*d − dφ* at grade {g}, degree {k}, entry ({}, {})", i + 1, j + 1),
                    Poly::constant(0, diff.get(i, j).clone()),
                ));
            }
        }
        let bt = gt.betti()?;
        let bc = gc.betti()?;
        equal &= bt == bc;
        rows.push((g, bc, bt));
    }
    Ok(TransportReport { rows, commutes: first_failure(checks), isomorphism, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    fn darboux(pairs: usize) -> (PolyMatrix, PolyMatrix) {
        let n = 2 * pairs;
        let mut w = RatMatrix::zeros(n, n);
        for i in 0..pairs {
            w.set(i, pairs + i, int(1));
            w.set(pairs + i, i, int(-1));
        }
        let inv = w.inverse().unwrap();
        (PolyMatrix::from_constants(&w, n), PolyMatrix::from_constants(&inv, n))
    }

    #[test]
    fn plane_and_four_space() {
        for pairs in [1, 2] {
            let (w, inv) = darboux(pairs);
            let sp = symplectic_to_poisson(&w, &inv).unwrap();
            assert!(sp.certificate.verdict.is_valid());
            let n = 2 * pairs;
            let rep = transport_cohomology(&sp, &Grading::poly_form(n, n), 3).unwrap();
            assert!(rep.commutes.is_valid() && rep.isomorphism && rep.equal, "{rep:?}");
            assert_eq!(rep.rows[0].1[0], 1);
        }
        // dx∧dy gives Π♯(dy) = ∂x, so Π = ∂y∧∂x
        let (w, inv) = darboux(1);
        let sp = symplectic_to_poisson(&w, &inv).unwrap();
        assert_eq!(sp.poisson.bivector().get(&[0, 1]), Poly::from_int(2, -1));
    }

    #[test]
    fn rejections() {
        let zero = PolyMatrix::zeros(2, 2, 2);
        assert!(matches!(symplectic_to_poisson(&zero, &zero), Err(Error::BadInverse(_))));
        let (w, _) = darboux(1);
        assert!(matches!(symplectic_to_poisson(&w, &w), Err(Error::BadInverse(_))));
        // dx1∧dx2 + dx3∧dx4 + x1 dx2∧dx3 has Pfaffian 1 but is not closed
        let x1 = Poly::var(4, 0);
        let mut m = PolyMatrix::zeros(4, 4, 4);
        for (i, j, p) in [(0, 1, Poly::one(4)), (2, 3, Poly::one(4)), (1, 2, x1)] {
            m.set(i, j, p.clone());
            m.set(j, i, -p);
        }
        let inv = m.inverse().unwrap();
        assert!(matches!(symplectic_to_poisson(&m, &inv), Err(Error::Invalid(_))));
    }
}
