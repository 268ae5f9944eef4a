mod common;

use algebroidkit::exactalg::{int, Poly};
use algebroidkit::groupoid::{
    build_la_groupoid, check_bang_vacant, check_vacant, equal_dimensions, f2_recover, naturality_square,
    roundtrip_iso, verify_as_cocycle, verify_as_sheaf, verify_groupoid, verify_groupoid_algebroid,
    verify_la_groupoid, GroupoidAlgebroid,
};
use algebroidkit::samples::random_groupoid_algebroid;
use proptest::prelude::*;
use rand::Rng;

/// Doubles one row of a non-identity `ψ_g`.
fn damage<R: Rng>(rng: &mut R, ga: &GroupoidAlgebroid) -> Option<GroupoidAlgebroid> {
    let r = ga.algebroid.rank();
    let e = ga.groupoid.group().identity();
    let others: Vec<usize> = (0..ga.groupoid.order()).filter(|&g| g != e).collect();
    if r == 0 || others.is_empty() {
        return None;
    }
    let g = others[rng.gen_range(0..others.len())];
    let i = rng.gen_range(0..r);
    let mut out = ga.clone();
    for j in 0..r {
        let v = out.psi[g].get(i, j) * &Poly::constant(ga.groupoid.dim(), int(2));
        out.psi[g].set(i, j, v);
    }
    Some(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_data_verifies_both_ways(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let ga = random_groupoid_algebroid(&mut rng);
        prop_assert!(verify_groupoid(&ga.groupoid).is_valid());
        prop_assert!(verify_as_cocycle(&ga).unwrap().is_valid());
        prop_assert!(verify_as_sheaf(&ga).is_valid());
        prop_assert!(verify_groupoid_algebroid(&ga).unwrap().is_valid());
        if ga.groupoid.dim() == 0 {
            let psi: Vec<_> = ga.psi.iter().map(common::constant_matrix).collect();
            prop_assert!(common::is_homomorphism(ga.groupoid.group().table(), &psi));
        }
    }

    #[test]
    fn damaged_arrows_are_caught(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let ga = random_groupoid_algebroid(&mut rng);
        if let Some(bad) = damage(&mut rng, &ga) {
            let cocycle = verify_as_cocycle(&bad).unwrap();
            let sheaf = verify_as_sheaf(&bad);
            prop_assert!(!cocycle.is_valid() || !sheaf.is_valid());
            prop_assert!(!verify_groupoid_algebroid(&bad).unwrap().is_valid());
            if bad.groupoid.dim() == 0 {
                let psi: Vec<_> = bad.psi.iter().map(common::constant_matrix).collect();
                prop_assert!(!common::is_homomorphism(bad.groupoid.group().table(), &psi));
            }
        }
    }

    #[test]
    fn la_groupoid_round_trip(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let ga = random_groupoid_algebroid(&mut rng);
        let l = build_la_groupoid(&ga).unwrap();
        prop_assert!(verify_la_groupoid(&l).unwrap().is_valid());
        prop_assert!(equal_dimensions(&l));
        let bang = check_bang_vacant(&l).unwrap();
        prop_assert_eq!(bang.is_valid(), check_vacant(&l).is_valid());
        prop_assert!(bang.is_valid());
        prop_assert_eq!(f2_recover(&l).unwrap(), ga);
        let (rebuilt, v) = roundtrip_iso(&l).unwrap();
        prop_assert!(v.is_valid());
        prop_assert!(verify_la_groupoid(&rebuilt).unwrap().is_valid());
        let id = algebroidkit::exactalg::PolyMatrix::identity(l.base.rank(), l.groupoid.dim());
        let arrows: Vec<_> = l.omega.iter().map(|o| algebroidkit::exactalg::PolyMatrix::identity(o.rank(), o.dim())).collect();
        prop_assert!(naturality_square(&l, &l, &arrows, &id).is_valid());
    }
}
