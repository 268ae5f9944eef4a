use super::polyvector::{schouten_bracket, PolyVectorField};
use crate::algebroid::{verify_algebroid, AlgebroidPresentation};
use crate::exactalg::{Poly, PolyMatrix};
use crate::groupoid::{DeskGroupoid, GroupoidAlgebroid};
use crate::verdict::first_failure;
use crate::{Error, Result, Verdict};

/// A bivector that has passed `[Π, Π] = 0`. Only `PoissonStructure::new`
/// constructs one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    pi: PolyVectorField,
}

impl PoissonStructure {
    pub fn new(pi: PolyVectorField) -> Result<Self> {
        match verify_poisson(&pi)? {
            Verdict::Valid => Ok(PoissonStructure { pi }),
            Verdict::Invalid(w) => Err(Error::Invalid(format!("not Poisson: {w}"))),
        }
    }

    pub fn bivector(&self) -> &PolyVectorField {
        &self.pi
    }

    pub fn nvars(&self) -> usize {
        self.pi.nvars()
    }

    pub fn matrix(&self) -> PolyMatrix {
        self.pi.matrix().expect("degree 2")
    }

    /// `{f, g} = Π(df, dg)`.
    pub fn bracket(&self, f: &Poly, g: &Poly) -> Poly {
        self.pi.bracket_functions(f, g)
    }
}

fn label(idx: &[usize]) -> String {
    idx.iter().map(|i| format!("∂{}", i + 1)).collect::<Vec<_>>().join("∧")
}

pub fn schouten_verdict(pi: &PolyVectorField) -> Result<Verdict> {
    let s = schouten_bracket(pi, pi)?;
    Ok(match s.first_nonzero() {
        None => Verdict::Valid,
        Some((idx, p)) => Verdict::from_residue(format!("[Π,Π] at {}", label(idx)), p.clone()),
    })
}

/// `{x_i,{x_j,x_k}} + {x_j,{x_k,x_i}} + {x_k,{x_i,x_j}}` over all `i < j < k`.
pub fn jacobi_verdict(pi: &PolyVectorField) -> Verdict {
    let n = pi.nvars();
    let x = |i| Poly::var(n, i);
    let br = |f: &Poly, g: &Poly| pi.bracket_functions(f, g);
    let mut checks = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let jac = br(&x(i), &br(&x(j), &x(k))) + br(&x(j), &br(&x(k), &x(i))) + br(&x(k), &br(&x(i), &x(j)));
                checks.push(Verdict::from_residue(format!("Jacobi on (x{}, x{}, x{})", i + 1, j + 1, k + 1), jac));
            }
        }
    }
    first_failure(checks)
}

/// `[Π, Π] = 0`, cross-checked against coordinate Jacobi. The returned
/// witness is the first nonzero trivector component.
pub fn verify_poisson(pi: &PolyVectorField) -> Result<Verdict> {
    if pi.degree() != 2 {
        return Err(Error::Shape(format!("a Poisson structure is a bivector, got degree {}", pi.degree())));
    }
    let schouten = schouten_verdict(pi)?;
    let jacobi = jacobi_verdict(pi);
    if schouten.is_valid() != jacobi.is_valid() {
        return Err(Error::Inconsistent(format!("[Π,Π] gives {schouten:?} but coordinate Jacobi gives {jacobi:?}")));
    }
    Ok(schouten)
}

/// `T*_Π X` in the frame `dx_i`: anchor row `i` is `Π♯(dx_i) = Σ_j Π^{ij} ∂_j`,
/// and `[dx_i, dx_j] = d Π^{ij}`.
pub fn cotangent_algebroid(p: &PoissonStructure) -> AlgebroidPresentation {
    let n = p.nvars();
    let m = p.matrix();
    let mut structure = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                structure.push(m.get(i, j).derive(k));
            }
        }
    }
    AlgebroidPresentation::from_structure(n, n, m, structure).expect("antisymmetric by construction")
}

/// Fibre-linear function `ξ̃ = Σ ξ_i p_i` on `A*`, coordinates `(x, p)`.
pub fn linear_function(a: &AlgebroidPresentation, xi: &[Poly]) -> Poly {
    let (n, r) = (a.dim(), a.rank());
    let mut out = Poly::zero(n + r);
    for (i, f) in xi.iter().enumerate() {
        out = out + f.embed(n + r, 0) * Poly::var(n + r, n + i);
    }
    out
}

/// The fibre-linear Poisson structure on `A*` over `Affine(n + r)`:
/// `{p_i, p_j} = Σ_k c^k_{ij} p_k`, `{p_i, x_μ} = ρ(e_i)^μ`, `{x_μ, x_ν} = 0`.
pub fn linear_poisson_on_dual(a: &AlgebroidPresentation) -> Result<PoissonStructure> {
    if let Verdict::Invalid(w) = verify_algebroid(a) {
        return Err(Error::Invalid(format!("algebroid does not verify: {w}")));
    }
    let (n, r) = (a.dim(), a.rank());
    let big = n + r;
    let mut entries = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            let mut c = Poly::zero(big);
            for k in 0..r {
                c = c + a.c(i, j, k).embed(big, 0) * Poly::var(big, n + k);
            }
            entries.push((vec![n + i, n + j], c));
        }
        for mu in 0..n {
            entries.push((vec![n + i, mu], a.anchor().get(i, mu).embed(big, 0)));
        }
    }
    PoissonStructure::new(PolyVectorField::new(big, 2, entries)?)
}

/// The three bracket rules on generators, plus fibre-linearity of every component.
pub fn check_linear_rules(a: &AlgebroidPresentation, p: &PoissonStructure) -> Verdict {
    let (n, r) = (a.dim(), a.rank());
    let big = n + r;
    if p.nvars() != big {
        return Verdict::Invalid(crate::Witness::new("chart of the dual", Poly::one(0)));
    }
    let x = |i| Poly::var(big, i);
    let mut checks = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let want = linear_function(a, &a.bracket_of(i, j));
            checks.push(Verdict::from_residue(
                format!("{{ẽ{}, ẽ{}}} − [e{}, e{}]~", i + 1, j + 1, i + 1, j + 1),
                p.bracket(&x(n + i), &x(n + j)) - want,
            ));
        }
        for mu in 0..n {
            checks.push(Verdict::from_residue(
                format!("{{ẽ{}, x{}}} − e{}(x{})", i + 1, mu + 1, i + 1, mu + 1),
                p.bracket(&x(n + i), &x(mu)) - a.act(i, &Poly::var(n, mu)).embed(big, 0),
            ));
        }
    }
    for mu in 0..n {
        for nu in 0..n {
            checks.push(Verdict::from_residue(format!("{{x{}, x{}}}", mu + 1, nu + 1), p.bracket(&x(mu), &x(nu))));
        }
    }
    for (idx, c) in p.bivector().components() {
        for (e, _) in c.terms() {
            let fibre: u32 = e[n..].iter().sum();
            if fibre > 1 {
                checks.push(Verdict::from_residue(format!("Π at {} is not fibre-linear", label(idx)), c.clone()));
            }
        }
    }
    first_failure(checks)
}

/// `g·Π = Π` for every arrow of a transformation groupoid on `Π`'s chart.
pub fn check_invariant_poisson(p: &PoissonStructure, g: &DeskGroupoid) -> Result<Verdict> {
    if g.dim() != p.nvars() {
        return Err(Error::Shape(format!("groupoid on Affine({}) and Π on Affine({})", g.dim(), p.nvars())));
    }
    let mut checks = Vec::new();
    for k in 0..g.order() {
        let pushed = p.bivector().push_forward(&g.act(k), &g.act_inv(k))?;
        let n = p.nvars();
        for i in 0..n {
            for j in i + 1..n {
                let diff = pushed.get(&[i, j]) - p.bivector().get(&[i, j]);
                checks.push(Verdict::from_residue(format!("g{}·Π − Π at ∂{}∧∂{}", k + 1, i + 1, j + 1), diff));
            }
        }
    }
    Ok(first_failure(checks))
}

/// `T*_Π X` over `G ⋉ X` with `ψ_g(dx_i) = dx_i ∘ (dl_g)⁻¹`, so row `i` of
/// `ψ_g` holds `∂(l_g⁻¹)_i / ∂y_a`.
pub fn cotangent_groupoid_algebroid(p: &PoissonStructure, g: &DeskGroupoid) -> Result<GroupoidAlgebroid> {
    let n = p.nvars();
    if g.dim() != n {
        return Err(Error::Shape(format!("groupoid on Affine({}) and Π on Affine({})", g.dim(), n)));
    }
    let psi = (0..g.order())
        .map(|k| {
            let inv = g.act_inv(k);
            PolyMatrix::from_rows(n, inv.iter().map(|f| (0..n).map(|a| f.derive(a)).collect()).collect())
        })
        .collect();
    GroupoidAlgebroid::new(g.clone(), cotangent_algebroid(p), psi)
}
