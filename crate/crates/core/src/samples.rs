//! Named examples and seeded random generators for test and acceptance suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebroid::{rank1_from_anchor, trivial_transitive, AlgebroidPresentation};
use crate::exactalg::{int, rat, Poly, PolyMatrix, RatMatrix, Rational};
use crate::groupoid::{DeskGroupoid, FiniteGroup, GroupoidAlgebroid};
use crate::poisson::{linear_poisson_on_dual, PolyVectorField};
use crate::pullback::{AffineMap, SplitSubmersion, SubmersionDatum};
use crate::Result;

pub fn sl2() -> AlgebroidPresentation {
    AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (2, 0, 1, int(1))]).expect("so(3) constants")
}

pub fn heisenberg() -> AlgebroidPresentation {
    AlgebroidPresentation::lie_algebra(3, &[(0, 1, 2, int(1))]).expect("Heisenberg constants")
}

/// `x ∂y∧∂z + y ∂z∧∂x + z ∂x∧∂y` on `Affine(3)`.
pub fn so3_bivector() -> PolyVectorField {
    let x = |i| Poly::var(3, i);
    PolyVectorField::new(3, 2, vec![(vec![1, 2], x(0)), (vec![2, 0], x(1)), (vec![0, 1], x(2))]).expect("so(3) bivector")
}

/// The Lie–Poisson bivector of the split form `[h, e] = 2e`, `[h, f] = −2f`, `[e, f] = h`.
pub fn sl2_split_bivector() -> PolyVectorField {
    let a = AlgebroidPresentation::lie_algebra(3, &[(0, 1, 1, int(2)), (0, 2, 2, int(-2)), (1, 2, 0, int(1))]).expect("sl2 constants");
    linear_poisson_on_dual(&a).expect("Lie algebra").bivector().clone()
}

/// `Σ_i dx_i∧dy_i` on `Affine(2·pairs)` with its inverse matrix.
pub fn darboux(pairs: usize) -> (PolyMatrix, PolyMatrix) {
    let n = 2 * pairs;
    let mut w = RatMatrix::zeros(n, n);
    for i in 0..pairs {
        w.set(i, pairs + i, int(1));
        w.set(pairs + i, i, int(-1));
    }
    let inv = w.inverse().expect("Darboux form is invertible");
    (PolyMatrix::from_constants(&w, n), PolyMatrix::from_constants(&inv, n))
}

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let num = rng.gen_range(-3..=3i64);
    let num = if num == 0 { 1 } else { num };
    rat(num, *[1, 1, 2].choose(rng).expect("nonempty"))
}

/// A sparse polynomial with up to `terms` monomials of degree `≤ max_deg`.
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(nvars);
    for _ in 0..terms {
        let mut exps = vec![0u32; nvars];
        if nvars > 0 {
            for _ in 0..rng.gen_range(0..=max_deg) {
                exps[rng.gen_range(0..nvars)] += 1;
            }
        }
        p = p + Poly::monomial(nvars, exps, small_rational(rng));
    }
    p
}

/// `I + N` with `N` strictly lower triangular, and its inverse.
pub fn unipotent<R: Rng>(rng: &mut R, size: usize, nvars: usize, max_deg: u32) -> (PolyMatrix, PolyMatrix) {
    let mut p = PolyMatrix::identity(size, nvars);
    for i in 0..size {
        for j in 0..i {
            if rng.gen_bool(0.5) {
                p.set(i, j, random_poly(rng, nvars, max_deg, 1));
            }
        }
    }
    if size > 1 && rng.gen_bool(0.5) {
        let perm = {
            let mut v: Vec<usize> = (0..size).collect();
            v.shuffle(rng);
            v
        };
        let mut q = PolyMatrix::zeros(size, size, nvars);
        for (i, &j) in perm.iter().enumerate() {
            q.set(i, j, Poly::one(nvars));
        }
        p = q.mul(&p);
    }
    let inv = p.inverse().expect("determinant is ±1");
    (p, inv)
}

fn lie_algebra<R: Rng>(rng: &mut R, max_rank: usize) -> AlgebroidPresentation {
    let mut options = vec![AlgebroidPresentation::abelian(0, 1)];
    if max_rank >= 2 {
        options.push(AlgebroidPresentation::lie_algebra(2, &[(0, 1, 1, int(1))]).expect("affine line algebra"));
        options.push(AlgebroidPresentation::abelian(0, 2));
    }
    if max_rank >= 3 {
        options.extend([sl2(), heisenberg(), AlgebroidPresentation::abelian(0, 3)]);
    }
    options.choose(rng).expect("nonempty").clone()
}

/// A valid presentation over `Affine(dim)` of rank `≤ max_rank`, in a random frame.
pub fn random_algebroid<R: Rng>(rng: &mut R, dim: usize, max_rank: usize) -> AlgebroidPresentation {
    let max_rank = max_rank.max(1);
    let base = loop {
        let pick = rng.gen_range(0..5);
        let a = match pick {
            0 if dim == 0 => lie_algebra(rng, max_rank),
            0 | 1 if dim > 0 && dim <= max_rank => AlgebroidPresentation::tangent(dim),
            2 if dim > 0 => {
                let v: Vec<Poly> = (0..dim).map(|_| random_poly(rng, dim, 2, 2)).collect();
                rank1_from_anchor(v).expect("rank 1")
            }
            3 if dim > 0 && dim < max_rank => {
                let g = lie_algebra(rng, max_rank - dim);
                trivial_transitive(&g, dim).expect("Lie algebra over a point")
            }
            4 => {
                let r = rng.gen_range(1..=max_rank);
                if dim == 0 {
                    lie_algebra(rng, r)
                } else {
                    AlgebroidPresentation::abelian(dim, r)
                }
            }
            _ => continue,
        };
        break a;
    };
    let deg = if dim == 0 { 0 } else { 1 };
    let (p, p_inv) = unipotent(rng, base.rank(), dim, deg);
    base.change_frame(&p, &p_inv).expect("unipotent frame change")
}

/// Adds a random polynomial to one structure function or anchor entry.
pub fn corrupt<R: Rng>(rng: &mut R, a: &AlgebroidPresentation) -> AlgebroidPresentation {
    let (n, r) = (a.dim(), a.rank());
    if n == 0 && r < 2 {
        return a.clone();
    }
    loop {
        let delta = random_poly(rng, n, 1, 1);
        if n > 0 && rng.gen_bool(0.4) {
            return a.perturb_anchor(rng.gen_range(0..r), rng.gen_range(0..n), &delta).expect("in range");
        }
        if r >= 2 {
            let i = rng.gen_range(0..r);
            let j = (i + rng.gen_range(1..r)) % r;
            return a.perturb_structure(i, j, rng.gen_range(0..r), &delta).expect("in range");
        }
        if n > 0 && r > 0 {
            return a.perturb_anchor(0, rng.gen_range(0..n), &delta).expect("in range");
        }
        if r == 0 {
            return a.clone();
        }
    }
}

/// A triangular polynomial automorphism of `Affine(n)` with its inverse.
/// Variables are solved in a random order; each new one is shifted by a
/// polynomial in those already solved.
pub fn random_triangular<R: Rng>(rng: &mut R, n: usize) -> (Vec<Poly>, Vec<Poly>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut forward = vec![Poly::zero(n); n];
    let mut inverse = vec![Poly::zero(n); n];
    let mut quadratic = false;
    for (pos, &v) in order.iter().enumerate() {
        let earlier = &order[..pos];
        let mut shift = Poly::zero(n);
        if !earlier.is_empty() && rng.gen_bool(0.7) {
            let a = earlier[rng.gen_range(0..earlier.len())];
            shift = Poly::var(n, a).scale(&small_rational(rng));
            if !quadratic && rng.gen_bool(0.3) {
                quadratic = true;
                let b = earlier[rng.gen_range(0..earlier.len())];
                shift = shift + (Poly::var(n, a) * Poly::var(n, b)).scale(&small_rational(rng));
            }
        }
        if rng.gen_bool(0.3) {
            shift = shift + Poly::constant(n, small_rational(rng));
        }
        forward[v] = Poly::var(n, v) + &shift;
        // x_v = u_v − shift(x_earlier(u))
        let moved = shift.substitute(&inverse_images(&inverse, earlier, n));
        inverse[v] = Poly::var(n, v) - moved;
    }
    (forward, inverse)
}

fn inverse_images(inverse: &[Poly], solved: &[usize], n: usize) -> Vec<Poly> {
    (0..n).map(|i| if solved.contains(&i) { inverse[i].clone() } else { Poly::var(n, i) }).collect()
}

/// A split submersion `Affine(n + k) → Affine(n)` in random triangular coordinates.
pub fn random_submersion<R: Rng>(rng: &mut R, n: usize, k: usize) -> SplitSubmersion {
    let (forward, inverse) = random_triangular(rng, n + k);
    SplitSubmersion::new(n, forward, inverse).expect("triangular maps are inverse to each other")
}

/// `σ(y) = Φ⁻¹(y, h(y))` for a random polynomial `h`.
pub fn random_section<R: Rng>(rng: &mut R, f: &SplitSubmersion) -> Vec<Poly> {
    let (n, k) = (f.target_dim(), f.fiber_dim());
    let mut args: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    args.extend((0..k).map(|_| if rng.gen_bool(0.5) { random_poly(rng, n, 1, 1) } else { Poly::zero(n) }));
    f.inverse().iter().map(|p| p.substitute(&args)).collect()
}

/// A descent datum for `φ!B`, regauged by a random unipotent frame change
/// that may depend on the fibre coordinates.
pub fn random_descent<R: Rng>(rng: &mut R, f: &SplitSubmersion, b: &AlgebroidPresentation) -> Result<SubmersionDatum> {
    let d = SubmersionDatum::canonical(f, b)?;
    let size = d.algebroid.rank();
    let (g, g_inv) = unipotent(rng, size, f.source_dim(), 1);
    d.regauge(&g, &g_inv)
}

/// A random bivector on `Affine(n)`: a Lie–Poisson structure, `f ∂_i∧∂_j`,
/// a constant one, or an arbitrary quadratic one.
pub fn random_bivector<R: Rng>(rng: &mut R, n: usize) -> PolyVectorField {
    let pick = rng.gen_range(0..4);
    match pick {
        0 if n == 3 => {
            let a = random_algebroid(rng, 0, 3);
            if a.rank() == 3 {
                return linear_poisson_on_dual(&a).expect("valid").bivector().clone();
            }
            random_bivector(rng, n)
        }
        1 if n >= 2 => {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            PolyVectorField::new(n, 2, vec![(vec![i, j], random_poly(rng, n, 2, 2))]).expect("in range")
        }
        2 => {
            let mut entries = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    entries.push((vec![i, j], Poly::constant(n, small_rational(rng))));
                }
            }
            PolyVectorField::new(n, 2, entries).expect("in range")
        }
        _ => {
            let mut entries = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.6) {
                        entries.push((vec![i, j], random_poly(rng, n, 2, 2)));
                    }
                }
            }
            PolyVectorField::new(n, 2, entries).expect("in range")
        }
    }
}

fn row_matrix(rows: &[&[i64]], nvars: usize) -> PolyMatrix {
    PolyMatrix::from_constants(&RatMatrix::from_ints(rows), nvars)
}

/// `ψ_{g^k} = M^k` for a cyclic group generated by an automorphism `M`.
fn powers(m: &PolyMatrix, order: usize) -> Vec<PolyMatrix> {
    let mut out = vec![PolyMatrix::identity(m.rows(), m.nvars())];
    for k in 1..order {
        out.push(out[k - 1].mul(m));
    }
    out
}

fn cyclic_maps(m: &RatMatrix, order: usize) -> (Vec<AffineMap>, Vec<AffineMap>) {
    let n = m.rows();
    let zero = vec![int(0); n];
    let mut maps = vec![AffineMap::identity(n)];
    for k in 1..order {
        maps.push(AffineMap::new(m.mul(&maps[k - 1].matrix).expect("square"), zero.clone()).expect("square"));
    }
    let inv = (0..order).map(|k| maps[(order - k) % order].clone()).collect();
    (maps, inv)
}

/// Automorphisms of a Lie algebra over a point generating a group of the given order.
fn point_automorphism(a_kind: usize, order: usize) -> Option<(AlgebroidPresentation, PolyMatrix)> {
    match (a_kind, order) {
        (0, 2) => Some((AlgebroidPresentation::abelian(0, 1), row_matrix(&[&[-1]], 0))),
        (1, 2) => Some((AlgebroidPresentation::abelian(0, 2), row_matrix(&[&[0, 1], &[1, 0]], 0))),
        (1, 3) => Some((AlgebroidPresentation::abelian(0, 2), row_matrix(&[&[0, 1], &[-1, -1]], 0))),
        (1, 4) => Some((AlgebroidPresentation::abelian(0, 2), row_matrix(&[&[0, 1], &[-1, 0]], 0))),
        (2, 2) => Some((sl2(), row_matrix(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, 1]], 0))),
        (2, 3) => Some((sl2(), row_matrix(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]], 0))),
        (2, 4) => Some((sl2(), row_matrix(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 1]], 0))),
        (3, 2) => Some((heisenberg(), row_matrix(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, -1]], 0))),
        (3, 3) => Some((heisenberg(), row_matrix(&[&[0, 1, 0], &[-1, -1, 0], &[0, 0, 1]], 0))),
        (3, 4) => Some((heisenberg(), row_matrix(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 1]], 0))),
        (4, 3) => Some((AlgebroidPresentation::abelian(0, 3), row_matrix(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]], 0))),
        _ => None,
    }
}

/// Linear actions on `Affine(1)` and `Affine(2)` (column convention `x ↦ Mx`).
fn linear_action(dim: usize, order: usize) -> Option<RatMatrix> {
    match (dim, order) {
        (1, 2) => Some(RatMatrix::from_ints(&[&[-1]])),
        (2, 2) => Some(RatMatrix::from_ints(&[&[0, 1], &[1, 0]])),
        (2, 3) => Some(RatMatrix::from_ints(&[&[0, -1], &[1, -1]])),
        (2, 4) => Some(RatMatrix::from_ints(&[&[0, -1], &[1, 0]])),
        _ => None,
    }
}

/// A valid groupoid algebroid over a finite group of order `≤ 4`: a Lie
/// algebra over `BG` with ψ by automorphisms, or a transformation groupoid on
/// `Affine(1)` or `Affine(2)` carrying its tangent bundle or a trivial bundle.
pub fn random_groupoid_algebroid<R: Rng>(rng: &mut R) -> GroupoidAlgebroid {
    loop {
        let case = rng.gen_range(0..4);
        match case {
            0 => {
                let order = rng.gen_range(1..=4);
                if order == 1 {
                    let a = lie_algebra(rng, 3);
                    return GroupoidAlgebroid::trivial(DeskGroupoid::over_point(FiniteGroup::trivial()), a).expect("trivial");
                }
                let Some((a, m)) = point_automorphism(rng.gen_range(0..5), order) else { continue };
                let g = DeskGroupoid::over_point(FiniteGroup::cyclic(order));
                return GroupoidAlgebroid::new(g, a, powers(&m, order)).expect("shapes");
            }
            1 => {
                let (a, flips) = if rng.gen_bool(0.5) {
                    (sl2(), [row_matrix(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]], 0), row_matrix(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, -1]], 0)])
                } else {
                    (heisenberg(), [row_matrix(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, -1]], 0), row_matrix(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]], 0)])
                };
                let both = flips[0].mul(&flips[1]);
                let psi = vec![PolyMatrix::identity(3, 0), flips[0].clone(), flips[1].clone(), both];
                return GroupoidAlgebroid::new(DeskGroupoid::over_point(FiniteGroup::klein()), a, psi).expect("shapes");
            }
            _ => {
                let dim = rng.gen_range(1..=2);
                let order = rng.gen_range(2..=4);
                let Some(m) = linear_action(dim, order) else { continue };
                let (maps, inv) = cyclic_maps(&m, order);
                let g = DeskGroupoid::transformation(FiniteGroup::cyclic(order), dim, maps.clone(), inv).expect("linear action");
                if case == 2 {
                    // ψ_g(∂_i) = Σ_a M_{ai} ∂_a, i.e. the transpose in row convention
                    let psi = maps.iter().map(|l| PolyMatrix::from_constants(&l.matrix.transpose(), dim)).collect();
                    return GroupoidAlgebroid::new(g, AlgebroidPresentation::tangent(dim), psi).expect("shapes");
                }
                let rank = rng.gen_range(1..=2);
                let fibre = if rank == 1 {
                    if order == 2 {
                        row_matrix(&[&[-1]], dim)
                    } else {
                        row_matrix(&[&[1]], dim)
                    }
                } else {
                    match order {
                        2 => row_matrix(&[&[0, 1], &[1, 0]], dim),
                        3 => row_matrix(&[&[0, 1], &[-1, -1]], dim),
                        _ => row_matrix(&[&[0, 1], &[-1, 0]], dim),
                    }
                };
                return GroupoidAlgebroid::new(g, AlgebroidPresentation::abelian(dim, rank), powers(&fibre, order)).expect("shapes");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::verify_algebroid;
    use crate::groupoid::verify_groupoid_algebroid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_algebroids_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let dim = rng.gen_range(0..=2);
            let a = random_algebroid(&mut rng, dim, 3);
            assert!(verify_algebroid(&a).is_valid(), "{a}");
        }
    }

    #[test]
    fn generated_groupoid_algebroids_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let ga = random_groupoid_algebroid(&mut rng);
            assert!(verify_groupoid_algebroid(&ga).unwrap().is_valid(), "{ga:?}");
        }
    }

    #[test]
    fn triangular_maps_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let k = rng.gen_range(0..=2);
            let f = random_submersion(&mut rng, n, k);
            let s = random_section(&mut rng, &f);
            assert!(f.is_section(&s));
        }
    }

    #[test]
    fn named_bivectors_are_poisson() {
        for pi in [so3_bivector(), sl2_split_bivector()] {
            assert!(crate::poisson::verify_poisson(&pi).unwrap().is_valid());
        }
    }
}
