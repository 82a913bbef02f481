use negdep_qmc::discrepancy::{
    local_discrepancy, star_discrepancy_cover, star_discrepancy_exact, weighted_star_discrepancy, Weights,
};
use negdep_qmc::geometry::is_net;
use negdep_qmc::negdep::{lhs_anchored_prob_exact, test_upper_nd, Verdict};
use negdep_qmc::samplers::{faure_net, sample, sample_scrambled_net};
use negdep_qmc::{CornerBox0, Interval, PointSet, RngStream, SchemeSpec};
use proptest::prelude::*;

fn schemes() -> impl Strategy<Value = SchemeSpec> {
    prop_oneof![
        Just(SchemeSpec::MonteCarlo),
        Just(SchemeSpec::LatinHypercube),
        Just(SchemeSpec::RsjRank1Lattice),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_replay_and_stay_in_cube(spec in schemes(), seed in any::<u64>(), n in prop::sample::select(vec![2usize, 3, 5, 7, 11])) {
        let a = sample(&spec, n, 2, &mut RngStream::new(seed)).unwrap();
        let b = sample(&spec, n, 2, &mut RngStream::new(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.data().iter().all(|x| (0.0..1.0).contains(x)));
        let back = PointSet::from_text(&a.to_text()).unwrap();
        prop_assert_eq!(a, back);
    }

    #[test]
    fn exact_discrepancy_dominates_every_corner_box(seed in any::<u64>(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let p = sample(&SchemeSpec::MonteCarlo, 12, 2, &mut RngStream::new(seed)).unwrap();
        let exact = star_discrepancy_exact(&p).unwrap().value;
        let local = local_discrepancy(&p, &CornerBox0::new(vec![x, y]).unwrap()).unwrap();
        prop_assert!(local.abs() <= exact + 1e-12);
        let cover = star_discrepancy_cover(&p, 0.1).unwrap();
        prop_assert!(cover.lower <= exact + 1e-12 && exact <= cover.upper + 1e-12);
    }

    #[test]
    fn unit_weights_recover_full_discrepancy_as_max(seed in any::<u64>()) {
        let p = sample(&SchemeSpec::LatinHypercube, 10, 3, &mut RngStream::new(seed)).unwrap();
        let full = star_discrepancy_exact(&p).unwrap().value;
        let w = weighted_star_discrepancy(&p, &Weights::Product { gamma: vec![1.0; 3] }).unwrap();
        prop_assert!(w >= full - 1e-15);
    }
}

#[test]
fn scrambling_keeps_net_property() {
    assert!(is_net(&faure_net(3, 2, 3).unwrap(), 3, 2, 3, 0).unwrap());
    let root = RngStream::new(5);
    for k in 0..10 {
        let p = sample_scrambled_net(3, 2, 3, &mut root.split(k)).unwrap();
        assert!(is_net(&p, 3, 2, 3, 0).unwrap());
    }
}

#[test]
fn lhs_tester_agrees_with_oracle() {
    let q = Interval::new(vec![0.0, 0.0], vec![0.4, 0.7]).unwrap();
    let rep = test_upper_nd(&SchemeSpec::LatinHypercube, 5, &q, 2, 1.0, 200_000, &mut RngStream::new(9)).unwrap();
    let exact = lhs_anchored_prob_exact(5, &[0.4, 0.7], 2).unwrap();
    assert!((rep.lhs - exact).abs() <= rep.ci_halfwidth);
    assert!(exact <= rep.rhs);
    assert_ne!(rep.verdict, Verdict::Violated);
}
