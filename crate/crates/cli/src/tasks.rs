use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use algebroidkit::algebroid::{algebroid_cohomology, check_morphism, verify_algebroid, Grading};
use algebroidkit::groupoid::{
    build_la_groupoid, check_bang_vacant, check_vacant, equal_dimensions, f2_recover, roundtrip_iso, verify_groupoid,
    verify_groupoid_algebroid, verify_la_groupoid,
};
use algebroidkit::poisson::{
    check_invariant_poisson, check_linear_rules, cotangent_algebroid, cotangent_groupoid_algebroid, jacobi_verdict,
    linear_poisson_on_dual, schouten_verdict, symplectic_to_poisson, transport_cohomology, verify_poisson,
};
use algebroidkit::pullback::{descend_along_section, verify_cover_descent, verify_submersion_descent, SubmersionDatum};
use algebroidkit::stackcoh::{cech_cohomology, compare_total_vs_invariants};
use algebroidkit::{
    AlgebroidPresentation, GroupoidAlgebroid, Poly, PolyMatrix, PolyVectorField, PullbackAlgebroid, Verdict, Witness,
};

use crate::report::{BettiRow, BettiTable, Report};
use crate::schema::{algebroid_doc, load_str, multivector_doc, Loaded};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Task {
    VerifyAlgebroid,
    VerifyMorphism,
    Pullback,
    Descend,
    VerifyDescent,
    BuildLaGroupoid,
    RoundtripF1F2,
    CechCohomology,
    InvariantCohomology,
    PoissonVerify,
    Cotangent,
    LinearPoisson,
    Symplectic,
}

impl Task {
    pub const ALL: [Task; 13] = [
        Task::VerifyAlgebroid,
        Task::VerifyMorphism,
        Task::Pullback,
        Task::Descend,
        Task::VerifyDescent,
        Task::BuildLaGroupoid,
        Task::RoundtripF1F2,
        Task::CechCohomology,
        Task::InvariantCohomology,
        Task::PoissonVerify,
        Task::Cotangent,
        Task::LinearPoisson,
        Task::Symplectic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::VerifyAlgebroid => "verify-algebroid",
            Task::VerifyMorphism => "verify-morphism",
            Task::Pullback => "pullback",
            Task::Descend => "descend",
            Task::VerifyDescent => "verify-descent",
            Task::BuildLaGroupoid => "build-la-groupoid",
            Task::RoundtripF1F2 => "roundtrip-f1f2",
            Task::CechCohomology => "cech-cohomology",
            Task::InvariantCohomology => "invariant-cohomology",
            Task::PoissonVerify => "poisson-verify",
            Task::Cotangent => "cotangent",
            Task::LinearPoisson => "linear-poisson",
            Task::Symplectic => "symplectic",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Task::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Task::ALL.iter().map(|t| t.name()).collect();
            CliError::Usage(format!("unknown task {s:?}; known tasks: {}", known.join(", ")))
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub max_degree: Option<usize>,
    pub grading: Option<String>,
}

pub fn digest(input: &str) -> String {
    format!("{:x}", Sha256::digest(input.as_bytes()))
}

/// Loads `input` and runs `task` on it.
pub fn run_task(task: Task, input: &str, opts: &Options) -> Result<Report, CliError> {
    let loaded = load_str(input)?;
    let mut r = Report::new(task.name(), digest(input));
    let ctx = Ctx { l: &loaded, opts };
    match task {
        Task::VerifyAlgebroid => ctx.verify_algebroid(&mut r)?,
        Task::VerifyMorphism => ctx.verify_morphism(&mut r)?,
        Task::Pullback => ctx.pullback(&mut r)?,
        Task::Descend => ctx.descend(&mut r)?,
        Task::VerifyDescent => ctx.verify_descent(&mut r)?,
        Task::BuildLaGroupoid => ctx.build_la_groupoid(&mut r)?,
        Task::RoundtripF1F2 => ctx.roundtrip(&mut r)?,
        Task::CechCohomology => ctx.cech(&mut r)?,
        Task::InvariantCohomology => ctx.invariant(&mut r)?,
        Task::PoissonVerify => ctx.poisson_verify(&mut r)?,
        Task::Cotangent => ctx.cotangent(&mut r)?,
        Task::LinearPoisson => ctx.linear_poisson(&mut r)?,
        Task::Symplectic => ctx.symplectic(&mut r)?,
    }
    Ok(r)
}

fn need<'a, T>(x: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    x.as_ref().ok_or_else(|| CliError::Field { field: name.to_string(), message: "required by this task".into() })
}

fn combination(coeffs: &[Poly], basis: &str) -> String {
    let parts: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(k, p)| {
            let name = format!("{basis}{}", k + 1);
            match p.to_string().as_str() {
                "1" => name,
                "-1" => format!("-{name}"),
                s if p.is_constant() => format!("{s} {name}"),
                s => format!("({s}) {name}"),
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

fn algebroid_lines(a: &AlgebroidPresentation) -> Vec<String> {
    let mut lines = vec![format!("rank {} over Affine({})", a.rank(), a.dim())];
    for i in 0..a.rank() {
        let v = a.anchor_of(i);
        if v.iter().any(|p| !p.is_zero()) {
            lines.push(format!("a(e{}) = {}", i + 1, combination(v, "∂")));
        }
    }
    for i in 0..a.rank() {
        for j in i + 1..a.rank() {
            let b = a.bracket_of(i, j);
            if b.iter().any(|p| !p.is_zero()) {
                lines.push(format!("[e{}, e{}] = {}", i + 1, j + 1, combination(&b, "e")));
            }
        }
    }
    lines
}

fn matrix_lines(m: &PolyMatrix) -> Vec<String> {
    (0..m.rows()).map(|i| format!("[{}]", m.row(i).iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))).collect()
}

fn multivector_lines(p: &PolyVectorField) -> Vec<String> {
    if p.is_zero() {
        return vec!["0".into()];
    }
    p.components()
        .map(|(idx, v)| {
            let names: Vec<String> = idx.iter().map(|i| format!("x{}", i + 1)).collect();
            format!("Π^{{{}}} = {v}", names.join(" "))
        })
        .collect()
}

fn matrix_verdict(diff: &PolyMatrix, what: &str) -> Verdict {
    match diff.first_nonzero() {
        None => Verdict::Valid,
        Some((i, j, p)) => Verdict::Invalid(Witness::new(format!("{what}, entry ({}, {})", i + 1, j + 1), p.clone())),
    }
}

struct Ctx<'a> {
    l: &'a Loaded,
    opts: &'a Options,
}

impl Ctx<'_> {
    fn grading(&self, dim: usize, rank: usize) -> Result<(Grading, String), CliError> {
        let name = match &self.opts.grading {
            Some(n) => n.clone(),
            None if dim == 0 => "poly".into(),
            None => "poly-form".into(),
        };
        Ok((Grading::named(&name, dim, rank)?, name))
    }

    fn cap(&self, dim: usize) -> i64 {
        self.l.cap.unwrap_or(if dim == 0 { 0 } else { 1 })
    }

    fn max_degree(&self) -> usize {
        self.opts.max_degree.unwrap_or(3)
    }

    fn algebroid(&self, r: &mut Report) -> Result<Option<&AlgebroidPresentation>, CliError> {
        let a = need(&self.l.algebroid, "algebroid")?;
        Ok(r.check("algebroid axioms", &verify_algebroid(a)).then_some(a))
    }

    /// Builds `(A, ψ)` and checks it; `None` when a check failed.
    fn groupoid_algebroid(&self, r: &mut Report) -> Result<Option<GroupoidAlgebroid>, CliError> {
        let g = need(&self.l.groupoid, "groupoid")?;
        let a = need(&self.l.algebroid, "algebroid")?;
        let psi = need(&self.l.psi, "psi")?;
        if !r.check("groupoid axioms", &verify_groupoid(g)) {
            return Ok(None);
        }
        let ga = GroupoidAlgebroid::new(g.clone(), a.clone(), psi.clone())?;
        if !r.check("algebroid axioms", &verify_algebroid(a)) {
            return Ok(None);
        }
        Ok(r.check("groupoid algebroid (cocycle, unit, ψ morphisms)", &verify_groupoid_algebroid(&ga)?).then_some(ga))
    }

    fn verify_algebroid(&self, r: &mut Report) -> Result<(), CliError> {
        let a = need(&self.l.algebroid, "algebroid")?;
        r.section("algebroid", algebroid_lines(a));
        if let Some(a) = self.algebroid(r)? {
            let (grading, name) = self.grading(a.dim(), a.rank())?;
            let cap = self.cap(a.dim());
            let rows = algebroid_cohomology(a, &grading, cap)?
                .into_iter()
                .map(|(grade, betti)| BettiRow { grade, betti, reliable: None })
                .collect();
            r.tables.push(BettiTable { title: format!("algebroid cohomology, {name} grading, grades up to {cap}"), rows });
        }
        Ok(())
    }

    fn verify_morphism(&self, r: &mut Report) -> Result<(), CliError> {
        let m = need(&self.l.morphism, "morphism")?;
        r.section("base map", m.base_map.iter().enumerate().map(|(i, p)| format!("y{} = {p}", i + 1)).collect());
        r.section("bundle map (row i is the image of e_i)", matrix_lines(&m.matrix));
        if !r.check("source algebroid axioms", &verify_algebroid(&m.source)) {
            return Ok(());
        }
        if !r.check("target algebroid axioms", &verify_algebroid(&m.target)) {
            return Ok(());
        }
        r.check("anchor and bracket compatibility", &check_morphism(m));
        Ok(())
    }

    fn pullback(&self, r: &mut Report) -> Result<(), CliError> {
        let f = need(&self.l.submersion, "submersion")?;
        let Some(a) = self.algebroid(r)? else { return Ok(()) };
        let pb = PullbackAlgebroid::along_submersion(f, a)?;
        r.check("pullback algebroid axioms", &verify_algebroid(pb.presentation()));
        r.check("projection f!A → A is a morphism", &check_morphism(&pb.projection()?));
        r.certificate.push(format!("rank f!A = {} = rank A + {}", pb.rank(), f.fiber_dim()));
        r.section("pullback algebroid", algebroid_lines(pb.presentation()));
        r.object("pullback", algebroid_doc(pb.presentation()));
        Ok(())
    }

    fn submersion_datum(&self, r: &mut Report) -> Result<Option<SubmersionDatum>, CliError> {
        let f = need(&self.l.submersion, "submersion")?;
        let psi = need(&self.l.descent_psi, "descent")?;
        let Some(a) = self.algebroid(r)? else { return Ok(None) };
        let d = SubmersionDatum::new(f.clone(), a.clone(), psi.clone())?;
        let rep = verify_submersion_descent(&d)?;
        r.certificate.extend(rep.certificate);
        Ok(r.check("descent datum", &rep.verdict).then_some(d))
    }

    fn descend(&self, r: &mut Report) -> Result<(), CliError> {
        let sigma = need(&self.l.section, "section")?;
        let Some(d) = self.submersion_datum(r)? else { return Ok(()) };
        let out = descend_along_section(&d, sigma)?;
        r.certificate.extend(out.report.certificate);
        r.check("Σ: φ!σ!A ≅ A and the descent square", &out.report.verdict);
        r.section("descended algebroid σ!A", algebroid_lines(out.algebroid.presentation()));
        r.object("descended", algebroid_doc(out.algebroid.presentation()));
        Ok(())
    }

    fn verify_descent(&self, r: &mut Report) -> Result<(), CliError> {
        if self.l.descent_psi.is_some() {
            self.submersion_datum(r)?;
            return Ok(());
        }
        let c = need(&self.l.cover, "cover")?;
        for (i, a) in c.charts.iter().enumerate() {
            if !r.check(&format!("chart {} algebroid axioms", i + 1), &verify_algebroid(a)) {
                return Ok(());
            }
        }
        let (rep, atlas) = verify_cover_descent(c)?;
        r.certificate.extend(rep.certificate);
        r.check("cover descent datum", &rep.verdict);
        if let Some(atlas) = atlas {
            let mut lines: Vec<String> =
                atlas.charts.iter().enumerate().map(|(i, a)| format!("U{}: rank {} over Affine({})", i + 1, a.rank(), a.dim())).collect();
            lines.extend(atlas.transitions.iter().map(|((i, j), m)| format!("θ{}{}: {}", i + 1, j + 1, matrix_lines(m).join(" "))));
            r.section("glued atlas", lines);
        }
        Ok(())
    }

    fn build_la_groupoid(&self, r: &mut Report) -> Result<(), CliError> {
        let Some(ga) = self.groupoid_algebroid(r)? else { return Ok(()) };
        let la = build_la_groupoid(&ga)?;
        if !r.check("LA-groupoid axioms", &verify_la_groupoid(&la)?) {
            return Ok(());
        }
        r.check("!-vacant: (ã, s̃): Ω → s!A is an isomorphism", &check_bang_vacant(&la)?);
        r.check("vacant: (ã, s̃): Ω → s*A is an isomorphism", &check_vacant(&la));
        r.check_bool("dim Ω_g = dim A on every component", equal_dimensions(&la), "total space dimensions");
        let lines = la
            .omega
            .iter()
            .enumerate()
            .map(|(g, o)| format!("Ω over g{}: rank {} over Affine({})", g + 1, o.rank(), o.dim()))
            .collect();
        r.section("components", lines);
        Ok(())
    }

    fn roundtrip(&self, r: &mut Report) -> Result<(), CliError> {
        let Some(ga) = self.groupoid_algebroid(r)? else { return Ok(()) };
        let la = build_la_groupoid(&ga)?;
        if !r.check("LA-groupoid axioms", &verify_la_groupoid(&la)?) {
            return Ok(());
        }
        let back = f2_recover(&la)?;
        let same = ga
            .psi
            .iter()
            .zip(&back.psi)
            .enumerate()
            .map(|(g, (a, b))| matrix_verdict(&b.sub(a), &format!("recovered ψ_g{} − ψ_g{}", g + 1, g + 1)))
            .find(|v| !v.is_valid())
            .unwrap_or(Verdict::Valid);
        let same = if same.is_valid() && back != ga {
            Verdict::Invalid(Witness::new("recovered algebroid differs", Poly::one(0)))
        } else {
            same
        };
        r.check("F₂F₁ = id", &same);
        let (_, iso) = roundtrip_iso(&la)?;
        r.check("F₁F₂ ≅ id via (ã, s̃)", &iso);
        Ok(())
    }

    fn cech(&self, r: &mut Report) -> Result<(), CliError> {
        let Some(ga) = self.groupoid_algebroid(r)? else { return Ok(()) };
        let (grading, name) = self.grading(ga.algebroid.dim(), ga.algebroid.rank())?;
        let cap = self.cap(ga.algebroid.dim());
        let n = self.max_degree();
        let rows = cech_cohomology(&ga, &grading, cap, n)?
            .into_iter()
            .map(|(grade, tb)| BettiRow { grade, betti: tb.betti, reliable: Some(tb.reliable) })
            .collect();
        r.tables.push(BettiTable { title: format!("total Čech cohomology, {name} grading, grades up to {cap}, degrees 0..={n}"), rows });
        Ok(())
    }

    fn invariant(&self, r: &mut Report) -> Result<(), CliError> {
        let Some(ga) = self.groupoid_algebroid(r)? else { return Ok(()) };
        let (grading, name) = self.grading(ga.algebroid.dim(), ga.algebroid.rank())?;
        let cap = self.cap(ga.algebroid.dim());
        let cmp = compare_total_vs_invariants(&ga, &grading, cap, self.max_degree())?;
        let total = cmp.rows.iter().map(|(g, t, _)| BettiRow { grade: *g, betti: t.clone(), reliable: None }).collect();
        let inv = cmp.rows.iter().map(|(g, _, i)| BettiRow { grade: *g, betti: i.clone(), reliable: None }).collect();
        r.tables.push(BettiTable { title: format!("total Čech cohomology, reliable degrees, {name} grading"), rows: total });
        r.tables.push(BettiTable { title: format!("invariant cohomology, {name} grading"), rows: inv });
        let mismatch = cmp.rows.iter().find(|(_, t, i)| t != i).map(|(g, _, _)| format!("grade {g}")).unwrap_or_default();
        r.check_bool("total = invariant in reliable degrees", cmp.equal, &mismatch);
        Ok(())
    }

    fn poisson(&self, r: &mut Report) -> Result<Option<&PolyVectorField>, CliError> {
        let pi = need(&self.l.bivector, "bivector")?;
        r.section("bivector", multivector_lines(pi));
        let v = verify_poisson(pi)?;
        r.check("[Π, Π] = 0", &schouten_verdict(pi)?);
        r.check("Jacobi identity on coordinate triples", &jacobi_verdict(pi));
        Ok(v.is_valid().then_some(pi))
    }

    fn poisson_verify(&self, r: &mut Report) -> Result<(), CliError> {
        self.poisson(r)?;
        Ok(())
    }

    fn cotangent(&self, r: &mut Report) -> Result<(), CliError> {
        let Some(pi) = self.poisson(r)? else { return Ok(()) };
        let p = algebroidkit::PoissonStructure::new(pi.clone())?;
        let cot = cotangent_algebroid(&p);
        r.check("cotangent algebroid axioms", &verify_algebroid(&cot));
        r.section("cotangent algebroid T*_Π (e_i = dx_i)", algebroid_lines(&cot));
        r.object("cotangent", algebroid_doc(&cot));
        if let Some(g) = &self.l.groupoid {
            if !r.check("groupoid axioms", &verify_groupoid(g)) {
                return Ok(());
            }
            if r.check("Π is invariant under the action", &check_invariant_poisson(&p, g)?) {
                let ga = cotangent_groupoid_algebroid(&p, g)?;
                r.check("T*_Π as an algebroid over the groupoid", &verify_groupoid_algebroid(&ga)?);
            }
        }
        Ok(())
    }

    fn linear_poisson(&self, r: &mut Report) -> Result<(), CliError> {
        let Some(a) = self.algebroid(r)? else { return Ok(()) };
        let p = linear_poisson_on_dual(a)?;
        r.check("[Π, Π] = 0 on A*", &verify_poisson(p.bivector())?);
        r.check("generator rules and fibrewise linearity", &check_linear_rules(a, &p));
        let (n, rank) = (a.dim(), a.rank());
        let mut lines = vec![format!("base coordinates x1..x{n}, fibre coordinates x{}..x{}", n + 1, n + rank)];
        lines.extend(multivector_lines(p.bivector()));
        r.section("linear Poisson structure", lines);
        r.object("bivector", multivector_doc(p.bivector()));
        Ok(())
    }

    fn symplectic(&self, r: &mut Report) -> Result<(), CliError> {
        let omega = need(&self.l.omega, "omega")?;
        let inv = need(&self.l.omega_inv, "omega_inv")?;
        let n = omega.rows();
        if inv.rows() != n {
            return Err(CliError::Field { field: "omega_inv".into(), message: format!("must be {n}x{n}") });
        }
        PolyVectorField::bivector_from_matrix(omega)?;
        let id = PolyMatrix::identity(n, n);
        if !r.check("ω·ω⁻¹ = I", &matrix_verdict(&omega.mul(inv).sub(&id), "ω·ω⁻¹ − I")) {
            return Ok(());
        }
        if !r.check("ω⁻¹·ω = I", &matrix_verdict(&inv.mul(omega).sub(&id), "ω⁻¹·ω − I")) {
            return Ok(());
        }
        let pi = PolyVectorField::bivector_from_matrix(inv)?;
        r.section("Π = ω⁻¹", multivector_lines(&pi));
        if !r.check("[Π, Π] = 0, equivalently dω = 0", &verify_poisson(&pi)?) {
            return Ok(());
        }
        let sp = symplectic_to_poisson(omega, inv)?;
        if !r.check("anchor T*_Π → T and its inverse are morphisms", &sp.certificate.verdict) {
            return Ok(());
        }
        let (grading, name) = self.grading(n, n)?;
        let cap = self.l.cap.unwrap_or(2);
        let tr = transport_cohomology(&sp, &grading, cap)?;
        r.check("pullback along the anchor commutes with the differentials", &tr.commutes);
        r.check_bool("pullback along the anchor is an isomorphism in each grade", tr.isomorphism, "a graded block is singular");
        r.check_bool("Betti numbers of T*_Π and T agree", tr.equal, "Betti tables differ");
        let cot = tr.rows.iter().map(|(g, b, _)| BettiRow { grade: *g, betti: b.clone(), reliable: None }).collect();
        let tan = tr.rows.iter().map(|(g, _, b)| BettiRow { grade: *g, betti: b.clone(), reliable: None }).collect();
        r.tables.push(BettiTable { title: format!("T*_Π cohomology, {name} grading, grades up to {cap}"), rows: cot });
        r.tables.push(BettiTable { title: format!("tangent cohomology, {name} grading, grades up to {cap}"), rows: tan });
        Ok(())
    }
}
