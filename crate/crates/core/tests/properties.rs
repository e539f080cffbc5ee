use bgraph::exactcount::{enumerated_pairing_count, exact_class_table, ClassKey, ExactConfig};
use bgraph::formulas::{
    count_restricted_pairings, g_asymptotic, g_bgraph_asymptotic, FormulaConfig,
};
use bgraph::montecarlo::trial_rng;
use bgraph::pairing::{defect_census, two_path_counts, Pairing, Sampler};
use bgraph::parallel::Execution;
use bgraph::switching::{apply, find_sites, SwitchingKind, SwitchingOp};
use bgraph::{feasibility, mu_parameters, side_moments, BigCount, Bipartition, DegreeSequence};
use proptest::prelude::*;

fn instance(max_n: usize, max_d: u32) -> impl Strategy<Value = (DegreeSequence, Bipartition)> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            (
                proptest::collection::vec(0..=max_d, n),
                proptest::collection::vec(proptest::bool::weighted(0.3), n),
            )
        })
        .prop_map(|(degrees, left)| {
            let n = degrees.len();
            let ds = DegreeSequence::new(degrees);
            let bip = Bipartition::new(n, (0..n).filter(|&v| left[v])).unwrap();
            (ds, bip)
        })
}

fn feasible(max_n: usize, max_d: u32) -> impl Strategy<Value = (DegreeSequence, Bipartition)> {
    instance(max_n, max_d).prop_filter("feasible", |(ds, bip)| feasibility(ds, bip).is_feasible())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_count_matches_enumeration((ds, bip) in feasible(6, 3)) {
        let cfg = ExactConfig::default();
        let formula = count_restricted_pairings(&ds, &bip).unwrap();
        prop_assume!(formula <= BigCount::from(20_000u32));
        let walked = enumerated_pairing_count(&ds, &bip, &cfg).unwrap();
        prop_assert_eq!(&formula, &BigCount::from(walked));
        let seq = exact_class_table(&ds, &bip, &ExactConfig { execution: Execution::Sequential, ..cfg }).unwrap();
        let par = exact_class_table(&ds, &bip, &cfg).unwrap();
        prop_assert_eq!(&seq, &par);
        prop_assert_eq!(seq.classes.values().sum::<BigCount>(), formula);
    }

    #[test]
    fn mu2_is_mu0_squared((ds, bip) in instance(12, 6)) {
        if let Ok(mu) = mu_parameters(&ds, &bip) {
            prop_assert_eq!(&mu.mu2, &(&mu.mu0 * &mu.mu0));
        }
    }

    #[test]
    fn empty_left_reduces_to_plain_formula(mut degrees in proptest::collection::vec(1u32..8, 1..40)) {
        let total: u32 = degrees.iter().sum();
        degrees[0] += total % 2;
        let ds = DegreeSequence::new(degrees);
        let cfg = FormulaConfig::default();
        let plain = g_asymptotic(&ds, &cfg).point.ln();
        let bgraph = g_bgraph_asymptotic(&ds, &Bipartition::empty(ds.n()), &cfg).unwrap().point.ln();
        prop_assert_eq!(plain.to_bits(), bgraph.to_bits());
    }

    #[test]
    fn samples_are_restricted_and_round_trip((ds, bip) in feasible(12, 4), seed in any::<u64>()) {
        let sampler = Sampler::new(&ds, &bip).unwrap();
        let p = sampler.sample(&mut trial_rng(seed, 0));
        prop_assert!(p.is_restricted());
        let back: Pairing = p.to_text().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn clean_pairings_satisfy_two_path_identities((ds, bip) in feasible(14, 4), seed in any::<u64>()) {
        let sampler = Sampler::new(&ds, &bip).unwrap();
        let p = sampler.sample(&mut trial_rng(seed, 1));
        if defect_census(&p).is_clean() {
            let (l, r) = side_moments(&ds, &bip).unwrap();
            let a = two_path_counts(&p);
            prop_assert_eq!(a[0] + 2 * a[1] + a[2], r.m2);
            prop_assert_eq!(a[3], l.m2);
        }
    }

    #[test]
    fn switchings_move_one_class_step_and_invert((ds, bip) in feasible(10, 3), seed in any::<u64>()) {
        let sampler = Sampler::new(&ds, &bip).unwrap();
        let p = sampler.sample(&mut trial_rng(seed, 2));
        let class = ClassKey::of(&defect_census(&p));
        for kind in SwitchingKind::ALL {
            for op in [SwitchingOp::forward(kind), SwitchingOp::inverse(kind)] {
                let (a, b, c) = op.class_shift();
                for site in find_sites(&p, op) {
                    let q = apply(&p, &site).unwrap();
                    prop_assert!(q.is_restricted());
                    let moved = ClassKey::of(&defect_census(&q));
                    prop_assert_eq!(moved.l0 as i64 - class.l0 as i64, a);
                    prop_assert_eq!(moved.l1 as i64 - class.l1 as i64, b);
                    prop_assert_eq!(moved.l2 as i64 - class.l2 as i64, c);
                    prop_assert_eq!(moved.has_higher_defect, class.has_higher_defect);
                    let mut back = site.clone();
                    back.op = op.reversed();
                    prop_assert_eq!(&apply(&q, &back).unwrap(), &p);
                }
            }
        }
    }
}
