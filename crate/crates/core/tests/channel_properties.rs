use proptest::prelude::*;
use roc_core::channel_models::{
    calibrate_chain, end_to_end_loss_db, fext_gain, frontend_gain, pair_gain, CableCategory, CableSpec,
    CalibrationTarget, FrontEndSpec,
};

fn category() -> impl Strategy<Value = CableCategory> {
    prop_oneof![Just(CableCategory::Cat5), Just(CableCategory::Cat5e), Just(CableCategory::Cat6), Just(CableCategory::Cat7)]
}

fn cable(cat: CableCategory, len: f64, scales: Vec<f64>) -> CableSpec {
    let mut c = CableSpec::new(cat, len, 4);
    c.pair_atten_scale = scales;
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pairs_are_passive(cat in category(), len in 0.0..500.0f64, f in 0.0..1e9f64,
                         scales in prop::collection::vec(0.5..3.0f64, 4), pair in 0usize..4) {
        let c = cable(cat, len, scales);
        prop_assert!(pair_gain(f, pair, &c).unwrap().norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn loss_grows_with_length_and_frequency(cat in category(), len in 1.0..300.0f64, dl in 0.0..200.0f64,
                                            f in 1e6..8e8f64, df in 0.0..2e8f64) {
        let g = |l: f64, f: f64| pair_gain(f, 0, &cable(cat, l, vec![])).unwrap().norm();
        prop_assert!(g(len + dl, f) <= g(len, f) * (1.0 + 1e-12));
        prop_assert!(g(len, f + df) <= g(len, f) * (1.0 + 1e-12));
    }

    #[test]
    fn crosstalk_is_bounded_and_reciprocal_in_magnitude(cat in category(), len in 0.0..500.0f64,
                                                        f in 0.0..1e9f64, fext_db in -80.0..0.0f64,
                                                        scales in prop::collection::vec(0.5..3.0f64, 4),
                                                        i in 0usize..4, j in 0usize..4) {
        prop_assume!(i != j);
        let mut c = cable(cat, len, scales);
        c.fext_ref_db = fext_db;
        let ij = fext_gain(f, i, j, &c).unwrap().norm();
        let ji = fext_gain(f, j, i, &c).unwrap().norm();
        prop_assert!(ij <= 1.0 + 1e-12);
        prop_assert!((ij - ji).abs() <= 1e-12 * ij.max(1e-300));
    }

    #[test]
    fn frontend_is_passive(f in 0.0..2e9f64, il in 0.0..30.0f64, order in 1u32..8) {
        let mut fe = FrontEndSpec::new(50e6, 450e6, il);
        fe.edge_order = order;
        prop_assert!(frontend_gain(f, &fe).unwrap().norm() <= 1.0 + 1e-12);
    }

    /// Targets generated from a known chain are reproduced by the fit.
    #[test]
    fn calibration_round_trip(il in 0.0..20.0f64, scale in 0.5..2.0f64, f_if in 60e6..400e6f64,
                              lens in prop::collection::vec(5.0..200.0f64, 2..6)) {
        prop_assume!(lens.iter().any(|&l| (l - lens[0]).abs() > 1.0));
        let nominal = CableSpec::new(CableCategory::Cat5e, 0.0, 4);
        let fe0 = FrontEndSpec::new(50e6, 450e6, 0.0);
        let mut truth = nominal.clone();
        truth.atten = truth.atten.scaled(scale);
        let fe_truth = FrontEndSpec { insertion_loss_db: il, ..fe0.clone() };
        let targets: Vec<CalibrationTarget> = lens.iter().map(|&l| {
            let c = CableSpec { length_m: l, ..truth.clone() };
            CalibrationTarget { length_m: l, f_if_hz: f_if, end_to_end_db: end_to_end_loss_db(&c, &fe_truth, f_if).unwrap() }
        }).collect();
        let fit = calibrate_chain(&targets, &nominal, &fe0).unwrap();
        prop_assert!(fit.max_abs_residual_db() < 1e-6);
        prop_assert!((fit.insertion_loss_db - il).abs() < 1e-6);
        prop_assert!((fit.atten_scale - scale).abs() < 1e-6);
    }
}
