//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript glue beyond `wasm-bindgen`'s loader. The
//! `*_json` functions hold the logic and are what the native tests call.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use roc_core::channel_models::{end_to_end_loss_db, fext_gain, pair_insertion_loss_db};
use roc_core::presets;
use roc_core::sf2sf::exhaustive_search;
use roc_core::units::{amplitude_to_db, MHZ};
use roc_core::waveform_lab::{evm_sweep, summarize_evm};

/// Largest number of mappings one `sinr_sweep` call will evaluate.
pub const MAX_SINR_CANDIDATES: usize = 400;

#[derive(Serialize)]
struct CableResponse {
    length_m: f64,
    freq_mhz: Vec<f64>,
    end_to_end_db: Vec<f64>,
    pair_loss_db: Vec<Vec<f64>>,
    fext_01_db: Vec<f64>,
}

/// Calibrated lab link cut to `length_m`, sampled at `points` IFs in
/// `[f_min_mhz, f_max_mhz]`. Pair losses use the heterogeneous scales of the
/// mapping study.
pub fn cable_response_json(length_m: f64, f_min_mhz: f64, f_max_mhz: f64, points: usize) -> Result<String, String> {
    if !(f_min_mhz > 0.0 && f_max_mhz > f_min_mhz) || !(2..=4096).contains(&points) {
        return Err("need 0 < f_min < f_max and 2..=4096 points".into());
    }
    let (mut cable, fe, _) = presets::calibrated(length_m).map_err(|e| e.to_string())?;
    let freqs: Vec<f64> =
        (0..points).map(|i| f_min_mhz + (f_max_mhz - f_min_mhz) * i as f64 / (points - 1) as f64).collect();
    let end_to_end_db = freqs
        .iter()
        .map(|f| end_to_end_loss_db(&cable, &fe, f * MHZ))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    cable.pair_atten_scale = presets::fig5().map_err(|e| e.to_string())?.cable.pair_atten_scale;
    let pair_loss_db =
        (0..cable.num_pairs).map(|p| freqs.iter().map(|f| pair_insertion_loss_db(f * MHZ, p, &cable)).collect()).collect();
    let fext_01_db = freqs
        .iter()
        .map(|f| fext_gain(f * MHZ, 0, 1, &cable).map(|g| amplitude_to_db(g.norm())))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&CableResponse { length_m, freq_mhz: freqs, end_to_end_db, pair_loss_db, fext_01_db })
        .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SinrView {
    theta_deg: Vec<f64>,
    ids: Vec<String>,
    curves: Vec<Vec<f64>>,
    envelope: Vec<f64>,
    best_id: String,
    best_objective_db: f64,
    dispersion_db: f64,
    dispersion_theta_deg: f64,
    candidates_total: usize,
}

/// MVDR SINR versus angle on the 8-antenna, 4-pair study, for every
/// `stride`-th mapping, with two interferers at the given angles.
pub fn sinr_sweep_json(
    stride: usize,
    interferer_a_deg: f64,
    interferer_b_deg: f64,
    theta_step_deg: f64,
    fext: bool,
) -> Result<String, String> {
    let mut study = presets::fig5().map_err(|e| e.to_string())?;
    let all = study.space.candidates(&study.signals, study.cable.num_pairs, &study.frontend).map_err(|e| e.to_string())?;
    let stride = stride.max(all.len().div_ceil(MAX_SINR_CANDIDATES)).max(1);
    let picked: Vec<usize> = (0..all.len()).step_by(stride).collect();
    let cands: Vec<_> = picked.iter().map(|&i| all[i].clone()).collect();
    study.scenario.interferer_thetas_deg = vec![interferer_a_deg, interferer_b_deg];
    study.scenario.sweep.step_deg = theta_step_deg;
    study.opts.fext = fext;
    let res = exhaustive_search(
        &study.scenario,
        study.scalarization,
        &study.signals,
        &study.cable,
        &study.frontend,
        study.opts,
        &cands,
    )
    .map_err(|e| e.to_string())?;
    let id = |k: usize| format!("c{:04}", picked[k]);
    serde_json::to_string(&SinrView {
        theta_deg: res.envelope.theta_deg.clone(),
        ids: (0..cands.len()).map(id).collect(),
        curves: res.curves.iter().map(|c| c.sinr_db.clone()).collect(),
        envelope: res.envelope.sinr_db.clone(),
        best_id: id(res.best_index),
        best_objective_db: res.best_objective,
        dispersion_db: res.dispersion_db,
        dispersion_theta_deg: res.dispersion_theta_deg,
        candidates_total: all.len(),
    })
    .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct EvmView {
    power_dbm: Vec<f64>,
    evm_db: Vec<f64>,
    snr_db: Vec<f64>,
    cfe_hz: Vec<f64>,
    min_evm_db: f64,
    min_at_dbm: f64,
    crossing_dbm: Option<f64>,
}

/// EVM versus input power through the calibrated `length_m` link.
pub fn evm_sweep_json(length_m: f64, seed: u64, lo_detune_hz: f64) -> Result<String, String> {
    let mut sweep = presets::fig6(length_m).map_err(|e| e.to_string())?.with_seed(seed);
    sweep.chain.lo_detune_hz = lo_detune_hz;
    let points = evm_sweep(&sweep).map_err(|e| e.to_string())?;
    let s = summarize_evm(&points, -25.0, 10.0).map_err(|e| e.to_string())?;
    serde_json::to_string(&EvmView {
        power_dbm: points.iter().map(|p| p.input_power_dbm).collect(),
        evm_db: points.iter().map(|p| p.metrics.evm_db).collect(),
        snr_db: points.iter().map(|p| p.snr_db).collect(),
        cfe_hz: points.iter().map(|p| p.metrics.cfe_hz).collect(),
        min_evm_db: s.min_evm_db,
        min_at_dbm: s.min_at_dbm,
        crossing_dbm: s.low_crossing_dbm,
    })
    .map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn cable_response(length_m: f64, f_min_mhz: f64, f_max_mhz: f64, points: usize) -> Result<String, JsValue> {
    cable_response_json(length_m, f_min_mhz, f_max_mhz, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sinr_sweep(
    stride: usize,
    interferer_a_deg: f64,
    interferer_b_deg: f64,
    theta_step_deg: f64,
    fext: bool,
) -> Result<String, JsValue> {
    sinr_sweep_json(stride, interferer_a_deg, interferer_b_deg, theta_step_deg, fext).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn evm_sweep_at(length_m: f64, seed: u64, lo_detune_hz: f64) -> Result<String, JsValue> {
    evm_sweep_json(length_m, seed, lo_detune_hz).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn cable_response_hits_the_calibration_target() {
        let v: Value = serde_json::from_str(&cable_response_json(50.0, 140.0, 240.0, 3).unwrap()).unwrap();
        assert_eq!(v["freq_mhz"][0].as_f64(), Some(140.0));
        assert!((v["end_to_end_db"][0].as_f64().unwrap() - 50.0).abs() < 1e-6);
        let pairs = v["pair_loss_db"].as_array().unwrap();
        assert_eq!(pairs.len(), 4);
        // scales grow with the pair index
        assert!(pairs[3][0].as_f64() > pairs[0][0].as_f64());
        assert!(cable_response_json(50.0, 200.0, 100.0, 3).is_err());
    }

    #[test]
    fn sinr_envelope_covers_sampled_curves() {
        let v: Value = serde_json::from_str(&sinr_sweep_json(63, -40.0, 25.0, 5.0, true).unwrap()).unwrap();
        let env: Vec<f64> = serde_json::from_value(v["envelope"].clone()).unwrap();
        let curves: Vec<Vec<f64>> = serde_json::from_value(v["curves"].clone()).unwrap();
        assert_eq!(curves.len(), 40);
        assert_eq!(v["candidates_total"].as_u64(), Some(2520));
        for c in &curves {
            assert!(c.iter().zip(&env).all(|(x, e)| x <= e));
        }
    }

    #[test]
    fn sinr_candidate_count_is_capped() {
        let v: Value = serde_json::from_str(&sinr_sweep_json(1, -40.0, 25.0, 30.0, false).unwrap()).unwrap();
        assert!(v["ids"].as_array().unwrap().len() <= MAX_SINR_CANDIDATES);
    }

    #[test]
    fn evm_view_matches_the_sweep_summary() {
        let v: Value = serde_json::from_str(&evm_sweep_json(50.0, 6, -4183.0).unwrap()).unwrap();
        assert_eq!(v["power_dbm"].as_array().unwrap().len(), 36);
        assert!(v["min_evm_db"].as_f64().unwrap() < -25.0);
        assert!(v["crossing_dbm"].as_f64().is_some());
        let cfe = v["cfe_hz"][20].as_f64().unwrap();
        assert!((cfe + 4183.0).abs() < 200.0, "{cfe}");
    }
}
