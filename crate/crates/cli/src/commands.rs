//! The experiments behind each subcommand. Each runner is a pure function of
//! the config and returns its CSV table and JSON summary; nothing touches the
//! filesystem here.

use serde_json::{json, Value};

use roc_core::beamforming::{sweep_theta, write_sinr_csv};
use roc_core::sf2sf::{
    exhaustive_search, greedy_mapping, space_mapping_count, validate_mapping, SearchResult, Sf2sfMapping,
};
use roc_core::waveform_lab::{
    coexistence_impact, evm_sweep, summarize_evm, write_evm_csv, write_throughput_csv,
};

use crate::config::{ExperimentConfig, Link};
use crate::CliError;

/// EVM limit of the WiMAX test signal.
pub const EVM_LIMIT_DB: f64 = -25.0;
/// Points this far below the EVM optimum count as noise limited.
pub const AWGN_BACKOFF_DB: f64 = 10.0;
/// Relative throughput loss treated as negligible.
pub const COEXIST_TOLERANCE: f64 = 0.05;

pub const CALIBRATE_CSV_HEADER: [&str; 5] = ["length_m", "f_if_hz", "target_db", "modeled_db", "residual_db"];
pub const PLAN_CSV_HEADER: [&str; 7] = ["signal", "pair", "rf_center_hz", "if_hz", "mirrored", "f_down_hz", "f_up_hz"];
pub const OPTIMIZE_CSV_HEADER: [&str; 4] = ["mapping_id", "objective_db", "pairs", "if_hz"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Exhaustive,
    Greedy,
}

/// Output of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub csv: Vec<u8>,
    pub summary: Value,
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(&r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Failed(e.to_string()))
}

fn fail(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

fn joined<T: ToString>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn mapping_id(i: usize) -> String {
    format!("c{i:04}")
}

fn describe(m: &Sf2sfMapping, cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let ifs = m.if_centers(&cfg.signal_specs())?;
    Ok(json!({
        "pairs": m.space.assignment(),
        "if_hz": ifs.iter().map(|x| x.0).collect::<Vec<_>>(),
        "f_down_hz": m.lo_plan.f_down_hz,
        "f_up_hz": m.lo_plan.f_up_hz,
    }))
}

pub fn calibrate(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let cfg = ExperimentConfig {
        calibration: crate::config::CalibrationSection { apply: true, ..cfg.calibration.clone() },
        ..cfg.clone()
    };
    let link = cfg.link()?;
    let fit = link.fit.expect("calibration requested");
    let targets = cfg.targets();
    let rows = targets.iter().zip(fit.modeled_db.iter().zip(&fit.residuals_db)).map(|(t, (m, r))| {
        vec![t.length_m.to_string(), t.f_if_hz.to_string(), t.end_to_end_db.to_string(), m.to_string(), r.to_string()]
    });
    let csv = table(&CALIBRATE_CSV_HEADER, rows.collect::<Vec<_>>())?;
    Ok(Artifacts {
        csv,
        summary: json!({
            "command": "calibrate",
            "insertion_loss_db": fit.insertion_loss_db,
            "atten_scale": fit.atten_scale,
            "max_abs_residual_db": fit.max_abs_residual_db(),
            "targets": targets.len(),
        }),
    })
}

/// The `[mapping]` of the config if present, otherwise the greedy mapping.
fn resolve_mapping(cfg: &ExperimentConfig, link: &Link) -> Result<(Sf2sfMapping, &'static str), CliError> {
    let signals = cfg.signal_specs();
    let mapping = match cfg.explicit_mapping() {
        Some(m) => (m?, "config"),
        None => (
            greedy_mapping(&signals, &link.cable, &link.frontend, &cfg.search_space(), cfg.link_options())?,
            "greedy",
        ),
    };
    let violations = validate_mapping(&signals, &mapping.0, &link.frontend);
    if !violations.is_empty() {
        return Err(CliError::Invalid(violations.iter().map(|v| v.to_string()).collect()));
    }
    Ok(mapping)
}

pub fn plan(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let link = cfg.link()?;
    let signals = cfg.signal_specs();
    if signals.is_empty() {
        return Err(CliError::Invalid(vec!["signals: plan needs at least one signal".into()]));
    }
    let (mapping, source) = resolve_mapping(cfg, &link)?;
    let ifs = mapping.if_centers(&signals)?;
    let pairs = mapping.space.assignment().ok_or_else(|| fail("mapping leaves a signal unrouted"))?;
    let rows = signals.iter().enumerate().map(|(n, s)| {
        vec![
            n.to_string(),
            pairs[n].to_string(),
            s.rf_center_hz.to_string(),
            ifs[n].0.to_string(),
            ifs[n].1.to_string(),
            mapping.lo_plan.f_down_hz[n].to_string(),
            mapping.lo_plan.f_up_hz[n].to_string(),
        ]
    });
    let csv = table(&PLAN_CSV_HEADER, rows.collect::<Vec<_>>())?;
    Ok(Artifacts {
        csv,
        summary: json!({
            "command": "plan",
            "source": source,
            "n_signals": signals.len(),
            "n_pairs": link.cable.num_pairs,
            "per_pair": cfg.search.per_pair,
            "space_mappings": space_mapping_count(signals.len(), link.cable.num_pairs, cfg.search.per_pair).to_string(),
            "mapping": describe(&mapping, cfg)?,
            "violations": Vec::<String>::new(),
        }),
    })
}

struct Search {
    candidates: Vec<Sf2sfMapping>,
    result: SearchResult,
    greedy_index: Option<usize>,
}

fn search(cfg: &ExperimentConfig, link: &Link) -> Result<Search, CliError> {
    let signals = cfg.signal_specs();
    let candidates = cfg.search_space().candidates(&signals, link.cable.num_pairs, &link.frontend)?;
    let result = exhaustive_search(
        &cfg.beam_scenario(),
        cfg.search.scalarization,
        &signals,
        &link.cable,
        &link.frontend,
        cfg.link_options(),
        &candidates,
    )?;
    let greedy = greedy_mapping(&signals, &link.cable, &link.frontend, &cfg.search_space(), cfg.link_options())?;
    let greedy_index = candidates.iter().position(|c| *c == greedy);
    Ok(Search { candidates, result, greedy_index })
}

pub fn optimize_mapping(cfg: &ExperimentConfig, strategy: Strategy) -> Result<Artifacts, CliError> {
    let link = cfg.link()?;
    let signals = cfg.signal_specs();
    let if_list = |m: &Sf2sfMapping| -> Result<String, CliError> {
        Ok(joined(m.if_centers(&signals)?.iter().map(|x| x.0)))
    };
    let pair_list = |m: &Sf2sfMapping| joined(m.space.assignment().unwrap_or_default());

    match strategy {
        Strategy::Exhaustive => {
            let s = search(cfg, &link)?;
            let r = &s.result;
            let rows = s
                .candidates
                .iter()
                .enumerate()
                .map(|(i, m)| Ok(vec![mapping_id(i), r.objectives[i].to_string(), pair_list(m), if_list(m)?]))
                .collect::<Result<Vec<_>, CliError>>()?;
            let greedy = s.greedy_index.map(|g| json!({ "mapping_id": mapping_id(g), "objective_db": r.objectives[g] }));
            Ok(Artifacts {
                csv: table(&OPTIMIZE_CSV_HEADER, rows)?,
                summary: json!({
                    "command": "optimize-mapping",
                    "strategy": "exhaustive",
                    "scalarization": cfg.search.scalarization,
                    "candidates_evaluated": s.candidates.len(),
                    "best": {
                        "mapping_id": mapping_id(r.best_index),
                        "objective_db": r.best_objective,
                        "mapping": describe(&r.best, cfg)?,
                    },
                    "greedy": greedy,
                    "dispersion_db": r.dispersion_db,
                    "dispersion_theta_deg": r.dispersion_theta_deg,
                }),
            })
        }
        Strategy::Greedy => {
            let m = greedy_mapping(&signals, &link.cable, &link.frontend, &cfg.search_space(), cfg.link_options())?;
            let curve = sweep_theta(&cfg.beam_scenario(), &signals, &link.cable, &link.frontend, &m, cfg.link_options())?;
            let objective = cfg.search.scalarization.apply(&curve);
            let row = vec!["greedy".to_string(), objective.to_string(), pair_list(&m), if_list(&m)?];
            Ok(Artifacts {
                csv: table(&OPTIMIZE_CSV_HEADER, [row])?,
                summary: json!({
                    "command": "optimize-mapping",
                    "strategy": "greedy",
                    "scalarization": cfg.search.scalarization,
                    "candidates_evaluated": 1,
                    "best": { "mapping_id": "greedy", "objective_db": objective, "mapping": describe(&m, cfg)? },
                }),
            })
        }
    }
}

pub fn sinr_sweep(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let link = cfg.link()?;
    let signals = cfg.signal_specs();
    let scenario = cfg.beam_scenario();
    let mut csv = Vec::new();
    let summary = if cfg.mapping.is_some() {
        let (m, _) = resolve_mapping(cfg, &link)?;
        let mut curve = sweep_theta(&scenario, &signals, &link.cable, &link.frontend, &m, cfg.link_options())?;
        curve.mapping_id = "config".into();
        write_sinr_csv(std::slice::from_ref(&curve), &mut csv).map_err(fail)?;
        json!({
            "command": "sinr-sweep",
            "curves": 1,
            "mean_sinr_db": curve.mean_db(),
            "min_sinr_db": curve.min_db(),
            "mapping": describe(&m, cfg)?,
        })
    } else {
        let s = search(cfg, &link)?;
        let r = s.result;
        let mut curves = r.curves.clone();
        curves.push(r.envelope.clone());
        write_sinr_csv(&curves, &mut csv).map_err(fail)?;
        json!({
            "command": "sinr-sweep",
            "curves": r.curves.len(),
            "envelope_id": r.envelope.mapping_id,
            "best_mapping_id": mapping_id(r.best_index),
            "best_objective_db": r.best_objective,
            "dispersion_db": r.dispersion_db,
            "dispersion_theta_deg": r.dispersion_theta_deg,
            "envelope_mean_db": r.envelope.mean_db(),
        })
    };
    Ok(Artifacts { csv, summary })
}

pub fn evm(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let seed = cfg.seed.ok_or_else(|| CliError::Config("seed: required by evm-sweep".into()))?;
    let link = cfg.link()?;
    let sweep = cfg.evm_sweep(&link, seed)?;
    let points = evm_sweep(&sweep)?;
    let mut csv = Vec::new();
    write_evm_csv(&points, &mut csv).map_err(fail)?;
    let shape = summarize_evm(&points, EVM_LIMIT_DB, AWGN_BACKOFF_DB)?;
    Ok(Artifacts {
        csv,
        summary: json!({
            "command": "evm-sweep",
            "seed": seed,
            "cable_length_m": link.cable.length_m,
            "chain_gain_db": sweep.chain.gain_db,
            "lo_detune_hz": sweep.chain.lo_detune_hz,
            "shape": shape,
        }),
    })
}

pub fn throughput(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let link = cfg.link()?;
    let scenario = cfg.throughput_scenario(&link)?;
    let rows = scenario.run()?;
    let mut csv = Vec::new();
    write_throughput_csv(&rows, &mut csv).map_err(fail)?;
    Ok(Artifacts {
        csv,
        summary: json!({
            "command": "throughput",
            "rows": rows.len(),
            "coexistence": coexistence_impact(&rows, COEXIST_TOLERANCE),
        }),
    })
}
