//! Oracles shared by the integration suites. None of them calls the routine
//! it is checking.
#![allow(dead_code)]

use algebroidkit::algebroid::{apply_vector, lie_bracket, AlgebroidPresentation, Representation};
use algebroidkit::exactalg::{Poly, PolyMatrix, RatMatrix, Rational};
use algebroidkit::poisson::PolyVectorField;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Anchor homomorphism and frame Jacobiator, straight from `a` and `c`:
/// `a^μ([e_i,e_j]) = [a(e_i), a(e_j)]^μ` and
/// `Σ_cyc (Σ_l c^l_{ij} c^m_{lk} − a(e_i)(c^m_{jk})) = 0`.
pub fn frame_axioms_hold(a: &AlgebroidPresentation) -> bool {
    let (n, r) = (a.dim(), a.rank());
    for i in 0..r {
        for j in i + 1..r {
            let lhs: Vec<Poly> = (0..n)
                .map(|mu| (0..r).fold(Poly::zero(n), |acc, l| acc + a.c(i, j, l) * a.anchor().get(l, mu)))
                .collect();
            let rhs = lie_bracket(a.anchor_of(i), a.anchor_of(j));
            if lhs != rhs {
                return false;
            }
        }
    }
    let term = |i: usize, j: usize, k: usize, m: usize| {
        let quad = (0..r).fold(Poly::zero(n), |acc, l| acc + a.c(i, j, l) * a.c(l, k, m));
        quad - apply_vector(a.anchor_of(i), a.c(j, k, m))
    };
    for i in 0..r {
        for j in i + 1..r {
            for k in j + 1..r {
                for m in 0..r {
                    let jac = term(i, j, k, m) + term(j, k, i, m) + term(k, i, j, m);
                    if !jac.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Rank by plain Gaussian elimination over ℚ.
pub fn rank_of(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map(Vec::len).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for k in c..cols {
                    let v = &rows[rank][k] * &f;
                    rows[i][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank_of_matrix(m: &RatMatrix) -> usize {
    rank_of((0..m.rows()).map(|i| m.row(i).to_vec()).collect())
}

fn subsets(r: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if r < k {
        return vec![];
    }
    let mut out = subsets(r - 1, k);
    for mut s in subsets(r - 1, k - 1) {
        s.push(r - 1);
        out.push(s);
    }
    out.sort();
    out
}

fn permutation_sign(v: &[usize]) -> Option<i64> {
    let mut s = 1;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            if v[a] == v[b] {
                return None;
            }
            if v[a] > v[b] {
                s = -s;
            }
        }
    }
    Some(s)
}

/// Chevalley–Eilenberg Betti numbers of a Lie algebra given by constant
/// structure functions, from the Koszul formula
/// `(dω)(x_0..x_k) = Σ_{a<b} (−1)^{a+b} ω([x_a,x_b], x_0..x̂_a..x̂_b..x_k)`.
pub fn ce_betti(a: &AlgebroidPresentation) -> Vec<usize> {
    assert_eq!(a.dim(), 0);
    let r = a.rank();
    let c = |i: usize, j: usize, m: usize| a.c(i, j, m).constant_term();
    let mut ranks = Vec::new();
    for k in 0..r {
        let src = subsets(r, k);
        let dst = subsets(r, k + 1);
        let mut rows = vec![vec![Rational::zero(); src.len()]; dst.len()];
        for (row, jset) in dst.iter().enumerate() {
            for (col, iset) in src.iter().enumerate() {
                let mut acc = Rational::zero();
                for x in 0..jset.len() {
                    for y in x + 1..jset.len() {
                        let rest: Vec<usize> = jset.iter().enumerate().filter(|&(t, _)| t != x && t != y).map(|(_, &v)| v).collect();
                        for m in 0..r {
                            let mut args = vec![m];
                            args.extend(&rest);
                            let mut sorted = args.clone();
                            sorted.sort_unstable();
                            if sorted != *iset {
                                continue;
                            }
                            if let Some(s) = permutation_sign(&args) {
                                let sign = if (x + y) % 2 == 0 { 1 } else { -1 };
                                acc += c(jset[x], jset[y], m) * Rational::from_integer((sign * s).into());
                            }
                        }
                    }
                }
                rows[row][col] = acc;
            }
        }
        ranks.push(rank_of(rows));
    }
    (0..=r)
        .map(|k| {
            let dim = subsets(r, k).len();
            dim - ranks.get(k).copied().unwrap_or(0) - if k > 0 { ranks[k - 1] } else { 0 }
        })
        .collect()
}

/// Flatness `∇_{e_i}∇_{e_j} − ∇_{e_j}∇_{e_i} − ∇_{[e_i,e_j]} = 0` on frame sections.
pub fn flat_on_frame(rep: &Representation) -> bool {
    let a = &rep.algebroid;
    let (n, r, m) = (a.dim(), a.rank(), rep.fiber_rank);
    let unit = |i: usize, len: usize| (0..len).map(|k| if k == i { Poly::one(n) } else { Poly::zero(n) }).collect::<Vec<_>>();
    for i in 0..r {
        for j in 0..r {
            for alpha in 0..m {
                let s = unit(alpha, m);
                let ij = rep.covariant(&unit(i, r), &rep.covariant(&unit(j, r), &s));
                let ji = rep.covariant(&unit(j, r), &rep.covariant(&unit(i, r), &s));
                let br = rep.covariant(&a.bracket_of(i, j), &s);
                if (0..m).any(|b| !(&ij[b] - &ji[b] - &br[b]).is_zero()) {
                    return false;
                }
            }
        }
    }
    true
}

/// `g ↦ ψ_gᵀ` is a homomorphism into invertible matrices, for a group table.
pub fn is_homomorphism(table: &[Vec<usize>], psi: &[RatMatrix]) -> bool {
    let order = table.len();
    let rho: Vec<RatMatrix> = psi.iter().map(RatMatrix::transpose).collect();
    if rho.iter().any(|m| rank_of_matrix(m) < m.rows()) {
        return false;
    }
    (0..order).all(|g| (0..order).all(|h| rho[table[g][h]] == rho[g].mul(&rho[h]).unwrap()))
}

fn wedge_all(fields: &[PolyVectorField], n: usize) -> PolyVectorField {
    fields.iter().fold(PolyVectorField::function(Poly::one(n)), |acc, f| acc.wedge(f).unwrap())
}

/// `[X_1∧…∧X_p, Y_1∧…∧Y_q] = Σ_{i,j} (−1)^{i+j} [X_i,Y_j]∧X_1…X̂_i…X_p∧Y_1…Ŷ_j…Y_q`.
pub fn schouten_decomposable(xs: &[Vec<Poly>], ys: &[Vec<Poly>], n: usize) -> PolyVectorField {
    let vf = |v: &Vec<Poly>| PolyVectorField::vector(v, n);
    let mut out = PolyVectorField::zero(n, xs.len() + ys.len() - 1);
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let mut parts = vec![PolyVectorField::vector(&lie_bracket(x, y), n)];
            parts.extend(xs.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| vf(v)));
            parts.extend(ys.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, v)| vf(v)));
            let mut term = wedge_all(&parts, n);
            if (i + j) % 2 == 1 {
                term = term.scale(&Poly::from_int(n, -1));
            }
            out = out.add(&term).unwrap();
        }
    }
    out
}

/// `[X_1∧…∧X_p, f] = Σ_i (−1)^{p−i} X_i(f) X_1∧…X̂_i…∧X_p` (1-indexed `i`).
pub fn schouten_with_function(xs: &[Vec<Poly>], f: &Poly, n: usize) -> PolyVectorField {
    let p = xs.len();
    let mut out = PolyVectorField::zero(n, p - 1);
    for (i, x) in xs.iter().enumerate() {
        let rest: Vec<PolyVectorField> = xs.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| PolyVectorField::vector(v, n)).collect();
        let mut term = wedge_all(&rest, n).scale(&apply_vector(x, f));
        if (p - 1 - i) % 2 == 1 {
            term = term.scale(&Poly::from_int(n, -1));
        }
        out = out.add(&term).unwrap();
    }
    out
}

pub fn constant_matrix(m: &PolyMatrix) -> RatMatrix {
    RatMatrix::from_rows((0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).constant_term()).collect()).collect())
}

pub fn one() -> Rational {
    Rational::one()
}
