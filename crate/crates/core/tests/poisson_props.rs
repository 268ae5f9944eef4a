mod common;

use algebroidkit::algebroid::{apply_vector, verify_algebroid};
use algebroidkit::exactalg::Poly;
use algebroidkit::poisson::{
    check_linear_rules, cotangent_algebroid, jacobi_verdict, linear_function, linear_poisson_on_dual,
    schouten_bracket, schouten_verdict, verify_poisson, PoissonStructure, PolyVectorField,
};
use algebroidkit::samples::{random_algebroid, random_bivector, random_poly};
use proptest::prelude::*;
use rand::Rng;

fn fields<R: Rng>(rng: &mut R, count: usize, n: usize) -> Vec<Vec<Poly>> {
    (0..count).map(|_| (0..n).map(|_| random_poly(rng, n, 2, 2)).collect()).collect()
}

fn wedge_fields(xs: &[Vec<Poly>], n: usize) -> PolyVectorField {
    xs.iter().fold(PolyVectorField::function(Poly::one(n)), |acc, v| acc.wedge(&PolyVectorField::vector(v, n)).unwrap())
}

fn sign(k: usize) -> Poly {
    Poly::from_int(0, if k % 2 == 0 { 1 } else { -1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn schouten_on_decomposables(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(2..=3);
        let (p, q) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let xs = fields(&mut rng, p, n);
        let ys = fields(&mut rng, q, n);
        let lhs = schouten_bracket(&wedge_fields(&xs, n), &wedge_fields(&ys, n)).unwrap();
        prop_assert_eq!(lhs, common::schouten_decomposable(&xs, &ys, n));
        let f = random_poly(&mut rng, n, 3, 3);
        let with_f = schouten_bracket(&wedge_fields(&xs, n), &PolyVectorField::function(f.clone())).unwrap();
        prop_assert_eq!(with_f, common::schouten_with_function(&xs, &f, n));
    }

    #[test]
    fn graded_antisymmetry_and_jacobi(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = 3;
        let degs: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=2)).collect();
        let v: Vec<PolyVectorField> = degs.iter().map(|&d| wedge_fields(&fields(&mut rng, d, n), n)).collect();
        let (p, q, r) = (degs[0], degs[1], degs[2]);
        let pq = schouten_bracket(&v[0], &v[1]).unwrap();
        let qp = schouten_bracket(&v[1], &v[0]).unwrap();
        let s = Poly::constant(n, sign((p - 1) * (q - 1)).constant_term());
        prop_assert!(pq.add(&qp.scale(&s)).unwrap().is_zero());

        // (−1)^{(p−1)(r−1)}[P,[Q,R]] + cyclic = 0
        let cyc = |a: &PolyVectorField, b: &PolyVectorField, c: &PolyVectorField, da: usize, dc: usize| {
            let inner = schouten_bracket(b, c).unwrap();
            schouten_bracket(a, &inner).unwrap().scale(&Poly::constant(n, sign((da - 1) * (dc - 1)).constant_term()))
        };
        let total = cyc(&v[0], &v[1], &v[2], p, r)
            .add(&cyc(&v[1], &v[2], &v[0], q, p)).unwrap()
            .add(&cyc(&v[2], &v[0], &v[1], r, q)).unwrap();
        prop_assert!(total.is_zero());
    }

    /// Both routes agree on arbitrary bivectors, and a verified `Π` yields a
    /// valid cotangent algebroid.
    #[test]
    fn poisson_routes_agree(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(2..=4);
        let pi = random_bivector(&mut rng, n);
        let s = schouten_verdict(&pi).unwrap();
        let j = jacobi_verdict(&pi);
        prop_assert_eq!(s.is_valid(), j.is_valid());
        let v = verify_poisson(&pi).unwrap();
        prop_assert_eq!(v.is_valid(), s.is_valid());
        if v.is_valid() {
            let p = PoissonStructure::new(pi).unwrap();
            let cot = cotangent_algebroid(&p);
            prop_assert!(verify_algebroid(&cot).is_valid());
            prop_assert!(common::frame_axioms_hold(&cot));
        }
    }

    /// `{ξ̃, ν̃} = [ξ,ν]~` and `{ξ̃, π*f} = π*(a(ξ)f)` on random sections.
    #[test]
    fn linear_poisson_rules(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(0..=2);
        let a = random_algebroid(&mut rng, n, 2);
        let p = linear_poisson_on_dual(&a).unwrap();
        prop_assert!(check_linear_rules(&a, &p).is_valid());
        let total = n + a.rank();
        let section = |rng: &mut rand_chacha::ChaCha8Rng| (0..a.rank()).map(|_| random_poly(rng, n, 1, 2)).collect::<Vec<_>>();
        let xi = section(&mut rng);
        let nu = section(&mut rng);
        let lhs = p.bracket(&linear_function(&a, &xi), &linear_function(&a, &nu));
        prop_assert_eq!(lhs, linear_function(&a, &a.bracket(&xi, &nu)));
        let f = random_poly(&mut rng, n, 2, 3);
        let lifted = f.embed(total, 0);
        let moved = apply_vector(&a.anchor_section(&xi), &f).embed(total, 0);
        prop_assert_eq!(p.bracket(&linear_function(&a, &xi), &lifted), moved);
    }
}
