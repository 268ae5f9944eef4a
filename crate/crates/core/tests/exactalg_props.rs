mod common;

use algebroidkit::exactalg::{int, Grade, GradedComplex, Poly, RatMatrix};
use algebroidkit::samples::{random_poly, small_rational};
use proptest::prelude::*;
use rand::Rng;

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(0.5) {
                m.set(i, j, small_rational(rng));
            }
        }
    }
    m
}

/// Product of elementary matrices, so invertible over ℚ.
fn random_invertible(rng: &mut impl Rng, n: usize) -> RatMatrix {
    let mut m = RatMatrix::identity(n);
    for _ in 0..2 * n {
        if n < 2 {
            break;
        }
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let mut e = RatMatrix::identity(n);
        e.set(i, j, small_rational(rng));
        m = e.mul(&m).unwrap();
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6) {
        let mut rng = common::rng(seed);
        let m = random_matrix(&mut rng, rows, cols);
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        prop_assert_eq!(m.rank(), common::rank_of_matrix(&m));
        for v in &kernel {
            prop_assert!(m.apply(v).iter().all(num_traits::Zero::is_zero));
        }
    }

    #[test]
    fn chain_rule(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let p = random_poly(&mut rng, 2, 3, 3);
        let phi: Vec<Poly> = (0..2).map(|_| random_poly(&mut rng, 2, 3, 2)).collect();
        let composite = p.substitute(&phi);
        for j in 0..2 {
            let mut want = Poly::zero(2);
            for (i, f) in phi.iter().enumerate() {
                want = want + p.derive(i).substitute(&phi) * f.derive(j);
            }
            prop_assert_eq!(composite.derive(j), want);
        }
    }

    /// A sum of elementary complexes `0 → ℚ → ℚ → 0` and lone copies of `ℚ`,
    /// conjugated by invertible matrices degree by degree; the Betti numbers
    /// are the number of lone copies in each degree.
    #[test]
    fn cohomology_of_disguised_complexes(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let len = 3;
        let lone: Vec<usize> = (0..len).map(|_| rng.gen_range(0..2)).collect();
        let pairs: Vec<usize> = (0..len - 1).map(|_| rng.gen_range(0..2)).collect();
        let dims: Vec<usize> = (0..len)
            .map(|k| lone[k] + if k < len - 1 { pairs[k] } else { 0 } + if k > 0 { pairs[k - 1] } else { 0 })
            .collect();
        // ordering within degree k: lone, then the sources of pairs[k], then the targets of pairs[k-1]
        let mut diffs = Vec::new();
        for k in 0..len - 1 {
            let mut d = RatMatrix::zeros(dims[k + 1], dims[k]);
            for t in 0..pairs[k] {
                let src = lone[k] + t;
                let dst = lone[k + 1] + if k + 1 < len - 1 { pairs[k + 1] } else { 0 } + t;
                d.set(dst, src, int(1));
            }
            diffs.push(d);
        }
        let q: Vec<RatMatrix> = dims.iter().map(|&n| random_invertible(&mut rng, n)).collect();
        let disguised: Vec<RatMatrix> = (0..len - 1)
            .map(|k| q[k + 1].mul(&diffs[k]).unwrap().mul(&q[k].inverse().unwrap()).unwrap())
            .collect();
        let complex = GradedComplex::new(vec![Grade::new(0, dims.clone(), disguised).unwrap()]);
        let betti = &complex.cohomology().unwrap()[0].1;
        prop_assert_eq!(betti, &lone);
    }
}
