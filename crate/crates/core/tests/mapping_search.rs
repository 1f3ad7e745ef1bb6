use roc_core::presets;
use roc_core::sf2sf::{
    enumerate_space_mappings, exhaustive_search, greedy_mapping, space_mapping_count, validate_mapping,
};

#[test]
fn lab_study_search() {
    let s = presets::fig5().unwrap();
    assert_eq!(enumerate_space_mappings(8, 4, 2).unwrap().len(), 2520);
    assert_eq!(space_mapping_count(8, 4, 2), 2520);

    let cands = s.space.candidates(&s.signals, s.cable.num_pairs, &s.frontend).unwrap();
    assert_eq!(cands.len(), 2520);
    for c in &cands {
        assert!(validate_mapping(&s.signals, c, &s.frontend).is_empty());
    }

    let res = exhaustive_search(&s.scenario, s.scalarization, &s.signals, &s.cable, &s.frontend, s.opts, &cands)
        .unwrap();
    assert!(res.objectives.iter().all(|&o| res.best_objective >= o));

    let greedy = greedy_mapping(&s.signals, &s.cable, &s.frontend, &s.space, s.opts).unwrap();
    let gi = cands.iter().position(|c| *c == greedy).expect("greedy mapping is a candidate");
    assert!(res.best_objective >= res.objectives[gi]);

    for c in &res.curves {
        for (e, v) in res.envelope.sinr_db.iter().zip(&c.sinr_db) {
            assert!(*e >= *v - 1e-9);
        }
    }
    assert!(res.dispersion_db >= 5.0, "dispersion {} dB", res.dispersion_db);
}
