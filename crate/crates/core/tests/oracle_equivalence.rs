//! The assembled `A(δ)` must agree entry by entry with the line-level
//! oracle, which mixes real tones through the chain without reusing the
//! assembler's routing logic.

use rand::seq::IndexedRandom;
use rand::Rng;
use roc_core::channel_models::{CableCategory, CableSpec, FrontEndSpec};
use roc_core::link_algebra::{default_grid, tone_oracle_cross, LinkModel, LinkOptions, Rat, SignalSpec};
use roc_core::seeds;
use roc_core::sf2sf::{enumerate_frequency_plans, InjectionSide, Sf2sfMapping, SpaceMap};
use roc_core::units::MHZ;

struct Case {
    signals: Vec<SignalSpec>,
    mapping: Sf2sfMapping,
    cable: CableSpec,
    fe: FrontEndSpec,
}

fn random_case(idx: u64) -> Case {
    let mut rng = seeds::rng(2024, "oracle-case", idx);
    let slots = [50.0 * MHZ, 75.0 * MHZ, 175.0 * MHZ, 400.0 * MHZ];
    let fe = FrontEndSpec::new(30.0 * MHZ, 450.0 * MHZ, 19.0);
    loop {
        let n = rng.random_range(2..=8usize);
        let l = rng.random_range(1..=4usize);
        let per_pair = n.div_ceil(l).max(1);
        if per_pair > slots.len() {
            continue;
        }
        let rf = *[2595.0, 2630.0, 2650.0].choose(&mut rng).unwrap() * MHZ;
        let signals: Vec<SignalSpec> = (0..n)
            .map(|i| {
                let bw = *[5.0, 10.0, 20.0].choose(&mut rng).unwrap() * MHZ;
                SignalSpec::new(i, rf, bw, Rat::Generic)
            })
            .collect();
        let mut load = vec![0usize; l];
        let mut assign = Vec::with_capacity(n);
        for _ in 0..n {
            let open: Vec<usize> = (0..l).filter(|&p| load[p] < per_pair).collect();
            let p = *open.choose(&mut rng).unwrap();
            load[p] += 1;
            assign.push(p);
        }
        let space = SpaceMap::from_assignment(&assign, l).unwrap();
        let side = if rng.random::<bool>() { InjectionSide::High } else { InjectionSide::Low };
        let plans = enumerate_frequency_plans(&signals, &space, &slots, &fe, side).unwrap();
        let Some(plan) = plans.choose(&mut rng) else { continue };
        let mut cable = CableSpec::new(CableCategory::Cat5e, rng.random_range(5.0..100.0), l);
        cable.pair_atten_scale = (0..l).map(|_| rng.random_range(0.8..2.0)).collect();
        cable.fext_ref_db = -20.0;
        cable.fext_seed = rng.random();
        return Case {
            signals,
            mapping: Sf2sfMapping { space, lo_plan: plan.clone(), per_pair },
            cable,
            fe,
        };
    }
}

#[test]
fn assembled_a_matches_tone_oracle() {
    let opts = LinkOptions { fext: true };
    let mut cross_checked = 0usize;
    for idx in 0..24 {
        let c = random_case(idx);
        let model = LinkModel::new(&c.signals, &c.mapping, &c.cable, &c.fe, opts).unwrap();
        let bw_min = c.signals.iter().map(|s| s.bandwidth_hz).fold(f64::INFINITY, f64::min);
        for d in default_grid(0.97 * bw_min, 32) {
            let a = model.a_at(d).unwrap();
            for n in 0..c.signals.len() {
                for m in 0..c.signals.len() {
                    let o = tone_oracle_cross(&c.signals, &c.mapping, &c.cable, &c.fe, opts, n, m, d).unwrap();
                    let v = a[(n, m)];
                    let scale = v.norm().max(o.norm());
                    assert!(
                        (v - o).norm() <= 1e-6 * scale + 1e-15,
                        "case {idx} δ={d} ({n},{m}): model {v} oracle {o}"
                    );
                    if m != n && scale > 0.0 {
                        cross_checked += 1;
                    }
                }
            }
        }
    }
    eprintln!("{cross_checked} nonzero cross entries checked");
    assert!(cross_checked > 0, "no FEXT entries were exercised");
}

#[test]
fn mismatched_los_shift_the_output_line() {
    // With f_U raised by 1 kHz the oracle finds the tone 1 kHz higher.
    let c = random_case(3);
    let mut m = c.mapping.clone();
    m.lo_plan.allow_detune = true;
    let opts = LinkOptions { fext: false };
    let rf = c.signals[0].rf_center_hz;
    let up_mirrors = m.lo_plan.f_up_hz[0] > rf;
    m.lo_plan.f_up_hz[0] += 1e3;
    let out = roc_core::link_algebra::propagate_tones(
        &c.signals,
        &m,
        &c.cable,
        &c.fe,
        opts,
        &[roc_core::link_algebra::ToneInput { port: 0, freq_hz: rf, amp: 1.0.into() }],
    )
    .unwrap();
    let strongest = out[0].iter().max_by(|a, b| a.amp.norm().total_cmp(&b.amp.norm())).unwrap();
    assert!((strongest.freq_hz - (rf + 1e3)).abs() < 1e-3, "{up_mirrors} {}", strongest.freq_hz);
}
