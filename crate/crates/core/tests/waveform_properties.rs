use rand::Rng;
use roc_core::presets;
use roc_core::seeds;
use roc_core::waveform_lab::{
    cfo_bin_hz, coexistence_impact, evm_sweep, gen_waveform, measure_link, summarize_evm, write_evm_csv,
    ImpairmentChain, Tcxo, WaveformSpec, CASE_CLEAN,
};

fn awgn_chain(wf_rate: f64, occ_bw: f64, snr_db: f64, seed: u64) -> ImpairmentChain {
    // 0 dBm received; the PSD sets the in-band SNR
    ImpairmentChain {
        noise_psd_dbm_hz: -snr_db - 10.0 * occ_bw.log10(),
        sample_rate_hz: wf_rate,
        seed,
        ..Default::default()
    }
}

#[test]
fn evm_follows_snr_under_awgn() {
    let trials = 60;
    let mut rng = seeds::rng(77, "evm-law", 0);
    let mut hits = 0;
    for t in 0..trials {
        let spec = WaveformSpec { seed: rng.random(), ..WaveformSpec::wimax() };
        let wf = gen_waveform(&spec).unwrap();
        let snr = rng.random_range(0.0..=40.0);
        let chain = awgn_chain(wf.sample_rate_hz(), spec.occupied_bandwidth_hz(), snr, t);
        let m = measure_link(&wf, &chain, 0.0, &Tcxo::default()).unwrap();
        if (m.evm_db + snr).abs() <= 0.5 {
            hits += 1;
        }
    }
    assert!(hits as f64 >= 0.95 * trials as f64, "{hits}/{trials} within 0.5 dB");
}

#[test]
fn cfe_recovers_detune_across_range() {
    let wf = gen_waveform(&WaveformSpec::wimax()).unwrap();
    let bin = cfo_bin_hz(wf.on_len, wf.sample_rate_hz());
    let mut rng = seeds::rng(78, "cfe-range", 0);
    for t in 0..25 {
        let detune = rng.random_range(-10_000.0..=10_000.0);
        let chain = ImpairmentChain {
            lo_detune_hz: detune,
            ..awgn_chain(wf.sample_rate_hz(), wf.spec.occupied_bandwidth_hz(), 30.0, t)
        };
        let m = measure_link(&wf, &chain, 0.0, &Tcxo::default()).unwrap();
        assert!((m.cfe_hz - detune).abs() <= bin, "{detune} -> {} (bin {bin})", m.cfe_hz);
    }
}

#[test]
fn lab_sweeps_are_u_shaped() {
    for (len, crossing_window) in [(50.0, (-9.0, -5.0)), (15.0, (-17.0, -13.0))] {
        let points = evm_sweep(&presets::fig6(len).unwrap()).unwrap();
        let s = summarize_evm(&points, -25.0, 10.0).unwrap();
        assert!(s.quasi_convex, "{len} m: {s:?}");
        assert!(s.min_evm_db < -25.0);
        let c = s.low_crossing_dbm.expect("threshold crossing");
        assert!(c > crossing_window.0 && c < crossing_window.1, "{len} m crossing at {c}");
        assert!(s.awgn_max_deviation_db <= 0.5, "{len} m: {s:?}");
        // the high-power end is distortion limited
        assert!(points.last().unwrap().metrics.evm_db > s.min_evm_db + 3.0);
    }
}

#[test]
fn sweep_is_deterministic() {
    let sweep = presets::fig6(50.0).unwrap();
    let csv = || {
        let mut buf = Vec::new();
        write_evm_csv(&evm_sweep(&sweep).unwrap(), &mut buf).unwrap();
        buf
    };
    assert_eq!(csv(), csv());
}

#[test]
fn clock_error_within_tcxo_bound() {
    let tcxo = Tcxo::default();
    let wf = gen_waveform(&WaveformSpec::wimax()).unwrap();
    for seed in 0..50 {
        let chain = awgn_chain(wf.sample_rate_hz(), wf.spec.occupied_bandwidth_hz(), 30.0, seed);
        let m = measure_link(&wf, &chain, 0.0, &tcxo).unwrap();
        assert!(m.clock_error_ppm.abs() <= 0.05 + 1e-12);
    }
}

#[test]
fn throughput_is_monotone_and_wifi_hits_only_high_mcs() {
    let scenario = presets::fig7().unwrap();
    let rows = scenario.run().unwrap();
    for &f in &scenario.if_hz {
        let clean: Vec<f64> =
            rows.iter().filter(|r| r.if_hz == f && r.case == CASE_CLEAN).map(|r| r.throughput_mbps).collect();
        assert!(clean.windows(2).all(|w| w[1] >= w[0]), "IF {f}: {clean:?}");
    }
    for imp in coexistence_impact(&rows, 0.05) {
        let first = imp.first_degraded_mcs.expect("interferer should matter at some MCS");
        assert!(first > 13, "IF {}: degraded from MCS {first}", imp.if_hz);
        assert!(imp.max_loss_below < 0.05);
    }
}
