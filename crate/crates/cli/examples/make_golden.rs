//! Regenerates `crates/cli/golden`: one valid and one corrupted input per
//! task, plus the expected text report for each.
//!
//!     cargo run -p algebroidkit-cli --example make_golden

use std::path::Path;

use algebroidkit::algebroid::rank1_from_anchor;
use algebroidkit::exactalg::{int, rat, RatMatrix};
use algebroidkit::pullback::{AffineMap, CoverDatum, Overlap, SubmersionDatum};
use algebroidkit::samples::{darboux, heisenberg, so3_bivector};
use algebroidkit::{
    AlgebroidPresentation, DeskGroupoid, FiniteGroup, MorphismData, Poly, PolyMatrix, PolyVectorField, SplitSubmersion,
};
use algebroidkit_cli::{run_task, to_json, Loaded, Options, Task};

fn x(n: usize, i: usize) -> Poly {
    Poly::var(n, i)
}

fn c(n: usize, v: i64) -> Poly {
    Poly::from_int(n, v)
}

fn doc(description: &str) -> Loaded {
    Loaded { description: Some(description.into()), ..Loaded::default() }
}

/// `e1 ↦ ∂, e2 ↦ x∂` with `[e1, e2] = e1` on the line.
fn affine_line() -> AlgebroidPresentation {
    let anchor = PolyMatrix::from_rows(1, vec![vec![c(1, 1)], vec![x(1, 0)]]);
    AlgebroidPresentation::new(1, 2, anchor, vec![((0, 1), vec![c(1, 1), c(1, 0)])]).unwrap()
}

/// Same anchor with the bracket dropped: the anchor is no longer a homomorphism.
fn broken_line() -> AlgebroidPresentation {
    let anchor = PolyMatrix::from_rows(1, vec![vec![c(1, 1)], vec![x(1, 0)]]);
    AlgebroidPresentation::new(1, 2, anchor, vec![]).unwrap()
}

fn so3() -> AlgebroidPresentation {
    algebroidkit::samples::sl2()
}

fn reflection(dim: usize, signs: &[i64]) -> DeskGroupoid {
    let diag: Vec<Vec<i64>> = (0..dim).map(|i| (0..dim).map(|j| if i == j { signs[i] } else { 0 }).collect()).collect();
    let rows: Vec<&[i64]> = diag.iter().map(Vec::as_slice).collect();
    let flip = AffineMap::new(RatMatrix::from_ints(&rows), vec![int(0); dim]).unwrap();
    let id = AffineMap::identity(dim);
    DeskGroupoid::transformation(FiniteGroup::cyclic(2), dim, vec![id.clone(), flip.clone()], vec![id, flip]).unwrap()
}

fn consts(rows: &[&[i64]], nvars: usize) -> PolyMatrix {
    PolyMatrix::from_constants(&RatMatrix::from_ints(rows), nvars)
}

fn submersion() -> SplitSubmersion {
    // (x1, x2) ↦ (x1 + x2², x2)
    let fwd = vec![x(2, 0) + x(2, 1).pow(2), x(2, 1)];
    let inv = vec![x(2, 0) - x(2, 1).pow(2), x(2, 1)];
    SplitSubmersion::new(1, fwd, inv).unwrap()
}

fn cases() -> Vec<(Task, Loaded, Loaded)> {
    let mut out = Vec::new();

    let mut good = doc("so(3) structure constants over a point");
    good.algebroid = Some(so3());
    let mut bad = doc("so(3) with [e1, e2] = e3 + e1, which breaks Jacobi");
    bad.algebroid = Some(so3().perturb_structure(0, 1, 0, &c(0, 1)).unwrap());
    out.push((Task::VerifyAlgebroid, good, bad));

    let source = rank1_from_anchor(vec![x(1, 0)]).unwrap();
    let target = AlgebroidPresentation::tangent(1);
    let mut good = doc("the anchor of the rank-one algebroid x∂ as a morphism to the tangent bundle");
    good.morphism = Some(
        MorphismData::new(source.clone(), target.clone(), vec![x(1, 0)], PolyMatrix::from_rows(1, vec![vec![x(1, 0)]])).unwrap(),
    );
    let mut bad = doc("the same map scaled by 2, which no longer commutes with the anchors");
    bad.morphism =
        Some(MorphismData::new(source, target, vec![x(1, 0)], PolyMatrix::from_rows(1, vec![vec![x(1, 0).scale(&int(2))]])).unwrap());
    out.push((Task::VerifyMorphism, good, bad));

    let mut good = doc("pullback of e1 ↦ ∂, e2 ↦ x∂ along (x1, x2) ↦ x1 + x2²");
    good.algebroid = Some(affine_line());
    good.submersion = Some(submersion());
    let mut bad = doc("pullback of a presentation whose anchor is not a homomorphism");
    bad.algebroid = Some(broken_line());
    bad.submersion = Some(submersion());
    out.push((Task::Pullback, good, bad));

    let f = submersion();
    let b = rank1_from_anchor(vec![x(1, 0)]).unwrap();
    let n = 3;
    let gauge = PolyMatrix::from_rows(2, vec![vec![c(2, 1), x(2, 0)], vec![c(2, 0), c(2, 1)]]);
    let gauge_inv = PolyMatrix::from_rows(2, vec![vec![c(2, 1), -x(2, 0)], vec![c(2, 0), c(2, 1)]]);
    let datum = SubmersionDatum::canonical(&f, &b).unwrap().regauge(&gauge, &gauge_inv).unwrap();
    let mut good = doc("the pullback of x∂ in a sheared frame, descended along the zero section");
    good.algebroid = Some(datum.algebroid.clone());
    good.submersion = Some(f.clone());
    good.descent_psi = Some(datum.psi.clone());
    good.section = Some(vec![x(1, 0), c(1, 0)]);
    let mut broken = datum.psi.clone();
    let last = broken.rows() - 1;
    let bumped = broken.get(last, last) + &Poly::one(n);
    broken.set(last, last, bumped);
    let mut bad = doc("the same datum with one entry of ψ bumped by 1");
    bad.algebroid = Some(datum.algebroid.clone());
    bad.submersion = Some(f);
    bad.descent_psi = Some(broken);
    bad.section = good.section.clone();
    out.push((Task::Descend, good, bad));

    let line = AlgebroidPresentation::abelian(1, 1);
    let shift = AffineMap::new(RatMatrix::from_ints(&[&[1]]), vec![int(1)]).unwrap();
    let two_charts = |theta_ji: PolyMatrix| CoverDatum {
        charts: vec![line.clone(), line.clone()],
        overlaps: vec![Overlap {
            i: 0,
            j: 1,
            into_i: AffineMap::identity(1),
            into_j: shift.clone(),
            theta_ij: consts(&[&[2]], 1),
            theta_ji,
        }],
        triples: vec![],
    };
    let mut good = doc("two charts of a trivial line bundle glued by the constant 2");
    good.cover = Some(two_charts(PolyMatrix::from_constants(&RatMatrix::from_rows(vec![vec![rat(1, 2)]]), 1)));
    let mut bad = doc("the same cover with an inconsistent reverse transition");
    bad.cover = Some(two_charts(consts(&[&[1]], 1)));
    out.push((Task::VerifyDescent, good, bad));

    let mut good = doc("ℤ/2 acting on the line by x ↦ -x, with its tangent bundle");
    good.groupoid = Some(reflection(1, &[-1]));
    good.algebroid = Some(AlgebroidPresentation::tangent(1));
    good.psi = Some(vec![consts(&[&[1]], 1), consts(&[&[-1]], 1)]);
    let mut bad = doc("the same action with ψ = id, which does not cover the reflection");
    bad.groupoid = good.groupoid.clone();
    bad.algebroid = good.algebroid.clone();
    bad.psi = Some(vec![consts(&[&[1]], 1), consts(&[&[1]], 1)]);
    out.push((Task::BuildLaGroupoid, good, bad));

    let diag = |s: i64, t: i64| consts(&[&[s, 0, 0], &[0, t, 0], &[0, 0, s * t]], 0);
    let mut good = doc("the Klein group acting on the Heisenberg algebra by sign changes");
    good.groupoid = Some(DeskGroupoid::over_point(FiniteGroup::klein()));
    good.algebroid = Some(heisenberg());
    good.psi = Some(vec![diag(1, 1), diag(-1, 1), diag(1, -1), diag(-1, -1)]);
    let mut bad = doc("the same action with the centre left fixed by the third element");
    bad.groupoid = good.groupoid.clone();
    bad.algebroid = good.algebroid.clone();
    bad.psi = Some(vec![diag(1, 1), diag(-1, 1), diag(1, -1), consts(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]], 0)]);
    out.push((Task::RoundtripF1F2, good, bad));

    let sign = |m: i64| vec![consts(&[&[1]], 0), consts(&[&[m]], 0)];
    let mut good = doc("ℤ/2 acting by the sign on a line over a point");
    good.groupoid = Some(DeskGroupoid::over_point(FiniteGroup::cyclic(2)));
    good.algebroid = Some(AlgebroidPresentation::abelian(0, 1));
    good.psi = Some(sign(-1));
    let mut bad = doc("ψ = 2 on the generator, which fails ψ_g ψ_g = id");
    bad.groupoid = good.groupoid.clone();
    bad.algebroid = good.algebroid.clone();
    bad.psi = Some(sign(2));
    out.push((Task::CechCohomology, good, bad));

    let mut good = doc("ℤ/2 swapping the two generators of an abelian algebra");
    good.groupoid = Some(DeskGroupoid::over_point(FiniteGroup::cyclic(2)));
    good.algebroid = Some(AlgebroidPresentation::abelian(0, 2));
    good.psi = Some(vec![consts(&[&[1, 0], &[0, 1]], 0), consts(&[&[0, 1], &[1, 0]], 0)]);
    let mut bad = doc("a shear in place of the swap, which is not an involution");
    bad.groupoid = good.groupoid.clone();
    bad.algebroid = good.algebroid.clone();
    bad.psi = Some(vec![consts(&[&[1, 0], &[0, 1]], 0), consts(&[&[1, 1], &[0, 1]], 0)]);
    out.push((Task::InvariantCohomology, good, bad));

    let bad_bivector = || {
        let (y, one) = (x(3, 1), c(3, 1));
        PolyVectorField::new(3, 2, vec![(vec![1, 2], y), (vec![0, 1], one)]).unwrap()
    };
    let mut good = doc("the Lie–Poisson structure of so(3)");
    good.bivector = Some(so3_bivector());
    let mut bad = doc("y ∂y∧∂z + ∂x∧∂y, which fails Jacobi");
    bad.bivector = Some(bad_bivector());
    out.push((Task::PoissonVerify, good, bad));

    let mut good = doc("so(3) Lie–Poisson with the half turn about the third axis");
    good.bivector = Some(so3_bivector());
    good.groupoid = Some(reflection(3, &[-1, -1, 1]));
    let mut bad = doc("the cotangent algebroid of a bivector that is not Poisson");
    bad.bivector = Some(bad_bivector());
    out.push((Task::Cotangent, good, bad));

    let mut good = doc("the fibrewise-linear Poisson structure dual to e1 ↦ ∂, e2 ↦ x∂");
    good.algebroid = Some(affine_line());
    let mut bad = doc("a presentation whose anchor is not a homomorphism");
    bad.algebroid = Some(broken_line());
    out.push((Task::LinearPoisson, good, bad));

    let (w, w_inv) = darboux(2);
    let mut good = doc("dx1∧dx3 + dx2∧dx4 on Affine(4)");
    good.omega = Some(w);
    good.omega_inv = Some(w_inv);
    good.cap = Some(2);
    let mut m = PolyMatrix::zeros(4, 4, 4);
    for (i, j, p) in [(0, 1, c(4, 1)), (2, 3, c(4, 1)), (1, 2, x(4, 0))] {
        m.set(i, j, p.clone());
        m.set(j, i, -p);
    }
    let mut bad = doc("dx1∧dx2 + dx3∧dx4 + x1 dx2∧dx3: nondegenerate but not closed");
    bad.omega_inv = Some(m.inverse().unwrap());
    bad.omega = Some(m);
    bad.cap = Some(2);
    out.push((Task::Symplectic, good, bad));

    out
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("golden");
    std::fs::create_dir_all(&dir).unwrap();
    let opts = Options::default();
    for (task, good, bad) in cases() {
        for (suffix, l, expect) in [("", good, true), (".corrupt", bad, false)] {
            let json = to_json(&l);
            let report = run_task(task, &json, &opts).unwrap_or_else(|e| panic!("{task}{suffix}: {e}"));
            assert_eq!(report.is_valid(), expect, "{task}{suffix}:\n{}", report.to_text());
            std::fs::write(dir.join(format!("{task}{suffix}.json")), &json).unwrap();
            std::fs::write(dir.join(format!("{task}{suffix}.expected.txt")), report.to_text()).unwrap();
        }
    }
}
