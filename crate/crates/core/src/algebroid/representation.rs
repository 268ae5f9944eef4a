use super::forms::{de_rham_d, subsets, Form};
use super::AlgebroidPresentation;
use crate::exactalg::{Poly, PolyMatrix};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

/// A flat `A`-connection on a trivial bundle `E` of rank `m`, in frame form:
/// `∇_{e_i} ε_α = Σ_β Γ^β_{iα} ε_β` with `gamma[i]` holding `Γ^β_{iα}` at row `α`, column `β`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub algebroid: AlgebroidPresentation,
    pub fiber_rank: usize,
    pub gamma: Vec<PolyMatrix>,
}

/// An `E`-valued form `Σ_β ω^β ⊗ ε_β`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedForm {
    pub parts: Vec<Form>,
}

impl Representation {
    pub fn new(algebroid: AlgebroidPresentation, fiber_rank: usize, gamma: Vec<PolyMatrix>) -> Result<Self> {
        let n = algebroid.dim();
        if gamma.len() != algebroid.rank()
            || gamma.iter().any(|g| g.rows() != fiber_rank || g.cols() != fiber_rank || g.nvars() != n)
        {
            return Err(Error::Shape(format!(
                "connection needs {} matrices of size {fiber_rank}x{fiber_rank}",
                algebroid.rank()
            )));
        }
        Ok(Representation { algebroid, fiber_rank, gamma })
    }

    pub fn trivial(algebroid: AlgebroidPresentation, fiber_rank: usize) -> Self {
        let (r, n) = (algebroid.rank(), algebroid.dim());
        let gamma = vec![PolyMatrix::zeros(fiber_rank, fiber_rank, n); r];
        Representation { algebroid, fiber_rank, gamma }
    }

    /// `∇_ξ s` for `ξ = Σ f_i e_i` and `s = Σ s_α ε_α`.
    pub fn covariant(&self, xi: &[Poly], s: &[Poly]) -> Vec<Poly> {
        let a = &self.algebroid;
        let n = a.dim();
        let mut out = vec![Poly::zero(n); self.fiber_rank];
        for (i, f) in xi.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for beta in 0..self.fiber_rank {
                let mut t = a.act(i, &s[beta]);
                for (alpha, sa) in s.iter().enumerate() {
                    let g = self.gamma[i].get(alpha, beta);
                    if !g.is_zero() && !sa.is_zero() {
                        t = t + sa * g;
                    }
                }
                out[beta] = &out[beta] + &(f * &t);
            }
        }
        out
    }

    pub fn frame_section(&self, alpha: usize) -> Vec<Poly> {
        let n = self.algebroid.dim();
        (0..self.fiber_rank).map(|b| if b == alpha { Poly::one(n) } else { Poly::zero(n) }).collect()
    }
}

/// The twisted differential `d_{A,∇}` on `E`-valued forms.
pub fn twisted_d(rep: &Representation, w: &TwistedForm) -> Result<TwistedForm> {
    let a = &rep.algebroid;
    if w.parts.len() != rep.fiber_rank {
        return Err(Error::Shape("twisted form has wrong fibre rank".into()));
    }
    let mut parts: Vec<Form> = w.parts.iter().map(|p| de_rham_d(a, p)).collect::<Result<_>>()?;
    let k = w.parts.first().map(Form::degree).unwrap_or(0);
    for j in subsets(a.rank(), k + 1) {
        for (pos, &ji) in j.iter().enumerate() {
            let rest: Vec<usize> = j.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &x)| x).collect();
            for beta in 0..rep.fiber_rank {
                let v = w.parts[beta].get(&rest);
                if v.is_zero() {
                    continue;
                }
                for gamma in 0..rep.fiber_rank {
                    let g = rep.gamma[ji].get(beta, gamma);
                    if g.is_zero() {
                        continue;
                    }
                    let t = &v * g;
                    let cur = parts[gamma].get(&j);
                    parts[gamma].set(j.clone(), if pos % 2 == 0 { cur + t } else { cur - t });
                }
            }
        }
    }
    Ok(TwistedForm { parts })
}

/// Checks `d_{A,∇} ∘ d_{A,∇} = 0` on every frame section of `E`.
pub fn verify_representation(rep: &Representation) -> Verdict {
    let a = &rep.algebroid;
    if a.rank() < 2 {
        return Verdict::Valid;
    }
    for alpha in 0..rep.fiber_rank {
        let parts = rep
            .frame_section(alpha)
            .into_iter()
            .map(|p| Form::function(a.rank(), p))
            .collect();
        let once = twisted_d(rep, &TwistedForm { parts }).expect("degree 0 below top");
        let twice = twisted_d(rep, &once).expect("degree 1 below top");
        for (beta, part) in twice.parts.iter().enumerate() {
            if let Some((idx, p)) = part.first_nonzero() {
                return Verdict::Invalid(Witness::new(
                    format!(
                        "d∇∘d∇(ε{}) on (e{},e{}), fibre component {}",
                        alpha + 1,
                        idx[0] + 1,
                        idx[1] + 1,
                        beta + 1
                    ),
                    p.clone(),
                ));
            }
        }
    }
    Verdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    #[test]
    fn sign_representation_of_abelian_line() {
        let a = AlgebroidPresentation::abelian(0, 1);
        let rep = Representation::new(a, 1, vec![PolyMatrix::from_rows(0, vec![vec![Poly::from_int(0, -1)]])]).unwrap();
        assert!(verify_representation(&rep).is_valid());
    }

    #[test]
    fn adjoint_representation_is_flat() {
        let sl2 = AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (2, 0, 1, int(1))]).unwrap();
        let gamma = (0..3)
            .map(|i| {
                let rows = (0..3).map(|al| (0..3).map(|be| sl2.c(i, al, be).clone()).collect()).collect();
                PolyMatrix::from_rows(0, rows)
            })
            .collect();
        let rep = Representation::new(sl2.clone(), 3, gamma).unwrap();
        assert!(verify_representation(&rep).is_valid());
        let mut broken = rep.clone();
        broken.gamma[0].set(0, 0, Poly::one(0));
        assert!(!verify_representation(&broken).is_valid());
    }

    #[test]
    fn tangent_connection_with_curvature() {
        // ∇_{∂x} ε = y ε, ∇_{∂y} ε = 0 on Affine(2): curvature −1.
        let a = AlgebroidPresentation::tangent(2);
        let y = Poly::var(2, 1);
        let rep = Representation::new(
            a,
            1,
            vec![PolyMatrix::from_rows(2, vec![vec![y]]), PolyMatrix::zeros(1, 1, 2)],
        )
        .unwrap();
        let w = verify_representation(&rep).witness().cloned().unwrap();
        assert_eq!(w.residue, Poly::from_int(2, -1));
    }
}
