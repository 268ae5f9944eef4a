//! Fixed inputs for the kernel benchmarks, so every run measures the same work.

use algebroidkit::exactalg::RatMatrix;
use algebroidkit::groupoid::{DeskGroupoid, FiniteGroup, GroupoidAlgebroid};
use algebroidkit::pullback::SplitSubmersion;
use algebroidkit::samples::{random_algebroid, random_bivector, random_submersion};
use algebroidkit::{AlgebroidPresentation, PolyMatrix, PolyVectorField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rank-3 algebroid over the plane and a submersion with a 2-dimensional fibre.
pub fn pullback_input() -> (SplitSubmersion, AlgebroidPresentation) {
    let mut r = rng(7);
    let f = random_submersion(&mut r, 2, 2);
    let a = random_algebroid(&mut r, 2, 3);
    (f, a)
}

pub fn bivector(n: usize) -> PolyVectorField {
    random_bivector(&mut rng(11), n)
}

/// `Z2` swapping the two generators of the abelian plane algebra.
pub fn swap() -> GroupoidAlgebroid {
    let psi = [RatMatrix::identity(2), RatMatrix::from_ints(&[&[0, 1], &[1, 0]])]
        .iter()
        .map(|m| PolyMatrix::from_constants(m, 0))
        .collect();
    GroupoidAlgebroid::new(DeskGroupoid::over_point(FiniteGroup::cyclic(2)), AlgebroidPresentation::abelian(0, 2), psi)
        .expect("the swap is a cocycle")
}
