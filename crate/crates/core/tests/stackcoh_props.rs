mod common;

use algebroidkit::algebroid::{AlgebroidPresentation, Grading};
use algebroidkit::groupoid::{DeskGroupoid, FiniteGroup, GroupoidAlgebroid};
use algebroidkit::samples::random_groupoid_algebroid;
use algebroidkit::stackcoh::{build_cech_complex, build_nerve, cech_cohomology, compare_total_vs_invariants, group_cochain_complex};
use proptest::prelude::*;
use rand::Rng;

fn grading_for(ga: &GroupoidAlgebroid) -> Grading {
    Grading::default_for(&ga.algebroid)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nerves_are_simplicial(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let ga = random_groupoid_algebroid(&mut rng);
        let top = if ga.groupoid.order() > 2 { 2 } else { 3 };
        let nerve = build_nerve(&ga.groupoid, top).unwrap();
        for (level, tuples) in nerve.levels.iter().enumerate() {
            prop_assert_eq!(tuples.len(), ga.groupoid.order().pow(level as u32));
        }
    }

    #[test]
    fn column_zero_is_the_bar_complex(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let ga = random_groupoid_algebroid(&mut rng);
        let grading = grading_for(&ga);
        let grade = rng.gen_range(0..=1);
        let c = build_cech_complex(&ga, 2, 1, &grading, grade).unwrap();
        prop_assert_eq!(c.column_zero(), group_cochain_complex(&ga, &grading, grade, 2).unwrap());
    }

    #[test]
    fn total_matches_invariants(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let ga = random_groupoid_algebroid(&mut rng);
        let grading = grading_for(&ga);
        let cap = if ga.groupoid.dim() == 0 { 0 } else { 1 };
        let cmp = compare_total_vs_invariants(&ga, &grading, cap, 2).unwrap();
        prop_assert!(cmp.equal, "{:?}", cmp);
    }
}

/// The zero algebroid over `BG` has the cohomology of a point over `ℚ`.
#[test]
fn zero_algebroid_over_bg() {
    for group in [FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::klein()] {
        let ga = GroupoidAlgebroid::trivial(DeskGroupoid::over_point(group), AlgebroidPresentation::abelian(0, 0)).unwrap();
        let b = cech_cohomology(&ga, &Grading::poly(0, 0), 0, 3).unwrap();
        assert_eq!(b[0].1.reliable_prefix(), &[1, 0, 0, 0]);
    }
}
