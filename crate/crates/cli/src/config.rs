//! Experiment configuration (TOML).
//!
//! Every physical key carries its unit as a suffix. Sections left out of a
//! file take the defaults below, which describe the 50 m lab setup.

// The negated comparisons in the validators are meant to catch NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use roc_core::beamforming::{BeamScenario, ThetaSweep};
use roc_core::channel_models::{
    calibrate_chain, CableCategory, CableSpec, CalibrationFit, CalibrationTarget, FrontEndSpec, NoiseModel,
    PhaseMode,
};
use roc_core::link_algebra::{LinkOptions, Rat, SignalSpec, MAX_RF_INPUT_DBM};
use roc_core::presets;
use roc_core::sf2sf::{lo_for_slot, InjectionSide, Scalarization, SearchSpace, Sf2sfMapping, SpaceMap};
use roc_core::waveform_lab::{
    power_grid, EvmSweep, ImpairmentChain, Interferer, McsTable, Modulation, Tcxo, ThroughputModel,
    ThroughputScenario, WaveformSpec,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; required by the stochastic experiments.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub cable: CableSection,
    #[serde(default)]
    pub frontend: FrontendSection,
    #[serde(default)]
    pub calibration: CalibrationSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub signals: Vec<SignalSection>,
    #[serde(default)]
    pub mapping: Option<MappingSection>,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub scenario: Option<ScenarioSection>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub waveform: Option<WaveformSection>,
    #[serde(default)]
    pub chain: Option<ChainSection>,
    #[serde(default)]
    pub throughput: Option<ThroughputSection>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CableSection {
    pub category: CableCategory,
    pub length_m: f64,
    pub num_pairs: usize,
    /// Per-pair multiplier of the insertion loss in dB; empty means nominal.
    pub pair_atten_scale: Vec<f64>,
    pub fext_ref_db: f64,
    pub fext_ref_hz: f64,
    pub velocity_factor: f64,
    pub fext_seed: u64,
}

impl Default for CableSection {
    fn default() -> Self {
        let c = presets::lab_cable(50.0);
        Self {
            category: c.category,
            length_m: c.length_m,
            num_pairs: c.num_pairs,
            pair_atten_scale: c.pair_atten_scale,
            fext_ref_db: c.fext_ref_db,
            fext_ref_hz: c.fext_ref_hz,
            velocity_factor: c.velocity_factor,
            fext_seed: c.fext_seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrontendSection {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub insertion_loss_db: f64,
    pub edge_order: u32,
    pub equalizer_tilt_db_per_hz: f64,
    pub phase: PhaseMode,
}

impl Default for FrontendSection {
    fn default() -> Self {
        let f = presets::lab_frontend();
        Self {
            f_min_hz: f.passband_hz.0,
            f_max_hz: f.passband_hz.1,
            insertion_loss_db: f.insertion_loss_db,
            edge_order: f.edge_order,
            equalizer_tilt_db_per_hz: f.equalizer_tilt_db_per_hz,
            phase: f.phase,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    /// Fit the front-end loss and cable scale to `targets` before running.
    pub apply: bool,
    pub targets: Vec<TargetSection>,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        Self {
            apply: true,
            targets: presets::lab_targets()
                .into_iter()
                .map(|t| TargetSection { length_m: t.length_m, f_if_hz: t.f_if_hz, end_to_end_db: t.end_to_end_db })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    pub length_m: f64,
    pub f_if_hz: f64,
    pub end_to_end_db: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub cable_noise_dbm_hz: f64,
    pub antenna_noise_dbm_hz: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let n = NoiseModel::default();
        Self { cable_noise_dbm_hz: n.cable_noise_dbm_hz, antenna_noise_dbm_hz: n.antenna_noise_dbm_hz }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub rf_center_hz: f64,
    pub bandwidth_hz: f64,
    #[serde(default = "default_rat")]
    pub rat: Rat,
    #[serde(default)]
    pub power_dbm: f64,
}

fn default_rat() -> Rat {
    Rat::Lte
}

/// An explicit mapping: pair and IF of every signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSection {
    pub pairs: Vec<usize>,
    pub if_hz: Vec<f64>,
    #[serde(default)]
    pub side: InjectionSide,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub per_pair: usize,
    pub if_slots_hz: Vec<f64>,
    pub side: InjectionSide,
    pub scalarization: Scalarization,
    pub fext: bool,
}

impl Default for SearchSection {
    fn default() -> Self {
        let s = SearchSpace::default();
        Self {
            per_pair: s.per_pair,
            if_slots_hz: vec![75e6, 175e6],
            side: s.side,
            scalarization: Scalarization::default(),
            fext: LinkOptions::default().fext,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub n_antennas: usize,
    pub element_spacing_wavelengths: f64,
    pub desired_theta_deg: f64,
    pub desired_power_dbm: f64,
    pub interferer_thetas_deg: Vec<f64>,
    pub interferer_powers_dbm: Vec<f64>,
    pub signal_bandwidth_hz: f64,
    pub delta_hz: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let s = BeamScenario::default();
        Self {
            n_antennas: s.n_antennas,
            element_spacing_wavelengths: s.element_spacing_wavelengths,
            desired_theta_deg: s.desired_theta_deg,
            desired_power_dbm: s.desired_power_dbm,
            interferer_thetas_deg: s.interferer_thetas_deg,
            interferer_powers_dbm: s.interferer_powers_dbm,
            signal_bandwidth_hz: s.signal_bandwidth_hz,
            delta_hz: s.delta_hz,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub theta_step_deg: f64,
    pub power_start_dbm: f64,
    pub power_stop_dbm: f64,
    pub power_step_db: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        let t = ThetaSweep::default();
        Self {
            theta_min_deg: t.min_deg,
            theta_max_deg: t.max_deg,
            theta_step_deg: t.step_deg,
            power_start_dbm: -30.0,
            power_stop_dbm: 5.0,
            power_step_db: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveformSection {
    pub rat: Rat,
    /// Overrides the RAT's default modulation.
    pub modulation: Option<Modulation>,
    pub n_symbols: Option<usize>,
    pub idle_symbols: usize,
}

impl Default for WaveformSection {
    fn default() -> Self {
        Self { rat: Rat::Wimax, modulation: None, n_symbols: None, idle_symbols: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSection {
    /// IF at which the chain gain is taken from the (calibrated) link.
    pub if_hz: f64,
    /// Output-referred noise floor.
    pub noise_psd_dbm_hz: f64,
    pub p1db_dbm: f64,
    pub lo_detune_hz: f64,
    pub tcxo_nominal_hz: f64,
    pub tcxo_stability_ppb: f64,
}

impl Default for ChainSection {
    fn default() -> Self {
        let t = Tcxo::default();
        Self {
            if_hz: presets::LAB_IF_HZ,
            noise_psd_dbm_hz: presets::LAB_NOISE_FLOOR_DBM_HZ,
            p1db_dbm: 5.0,
            lo_detune_hz: -4183.0,
            tcxo_nominal_hz: t.nominal_hz,
            tcxo_stability_ppb: t.stability_ppb,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThroughputSection {
    pub rat: Rat,
    pub bandwidth_hz: f64,
    pub power_dbm: f64,
    pub rank: u32,
    pub noise_psd_dbm_hz: f64,
    pub if_hz: Vec<f64>,
    /// Empty means every index of the RAT's table.
    pub mcs: Vec<u32>,
    pub interferer: Option<Interferer>,
    pub rolloff_db: f64,
}

impl Default for ThroughputSection {
    fn default() -> Self {
        Self {
            rat: Rat::Lte,
            bandwidth_hz: 5e6,
            power_dbm: -5.0,
            rank: 2,
            noise_psd_dbm_hz: presets::LAB_NOISE_FLOOR_DBM_HZ,
            if_hz: vec![75e6, 175e6],
            mcs: Vec::new(),
            interferer: None,
            rolloff_db: ThroughputModel::default().rolloff_db,
        }
    }
}

/// One finding of [`validate_config`], tied to the offending key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub key: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

fn diag(key: impl Into<String>, message: impl Into<String>) -> Diagnostic {
    Diagnostic { key: key.into(), message: message.into() }
}

/// Cable and front-end after the optional calibration step.
#[derive(Clone, Debug)]
pub struct Link {
    pub cable: CableSpec,
    pub frontend: FrontEndSpec,
    pub fit: Option<CalibrationFit>,
}

impl ExperimentConfig {
    pub fn scenario(&self) -> ScenarioSection {
        self.scenario.clone().unwrap_or_default()
    }

    pub fn waveform(&self) -> WaveformSection {
        self.waveform.unwrap_or_default()
    }

    pub fn chain(&self) -> ChainSection {
        self.chain.unwrap_or_default()
    }

    pub fn throughput(&self) -> ThroughputSection {
        self.throughput.clone().unwrap_or_default()
    }

    pub fn nominal_cable(&self) -> CableSpec {
        let c = &self.cable;
        CableSpec {
            category: c.category,
            length_m: c.length_m,
            num_pairs: c.num_pairs,
            atten: c.category.default_coeffs(),
            pair_atten_scale: c.pair_atten_scale.clone(),
            fext_ref_db: c.fext_ref_db,
            fext_ref_hz: c.fext_ref_hz,
            noise_floor_dbm_hz: self.noise.cable_noise_dbm_hz,
            velocity_factor: c.velocity_factor,
            fext_seed: c.fext_seed,
        }
    }

    pub fn nominal_frontend(&self) -> FrontEndSpec {
        let f = &self.frontend;
        FrontEndSpec {
            passband_hz: (f.f_min_hz, f.f_max_hz),
            insertion_loss_db: f.insertion_loss_db,
            edge_order: f.edge_order,
            equalizer_tilt_db_per_hz: f.equalizer_tilt_db_per_hz,
            design_length_m: 0.0,
            phase: f.phase,
        }
    }

    pub fn targets(&self) -> Vec<CalibrationTarget> {
        self.calibration
            .targets
            .iter()
            .map(|t| CalibrationTarget { length_m: t.length_m, f_if_hz: t.f_if_hz, end_to_end_db: t.end_to_end_db })
            .collect()
    }

    pub fn link(&self) -> roc_core::Result<Link> {
        let cable = self.nominal_cable();
        let frontend = self.nominal_frontend();
        if !self.calibration.apply {
            return Ok(Link { cable, frontend, fit: None });
        }
        let fit = calibrate_chain(&self.targets(), &cable, &frontend)?;
        let (cable, frontend) = fit.apply(&cable, &frontend);
        Ok(Link { cable, frontend, fit: Some(fit) })
    }

    pub fn signal_specs(&self) -> Vec<SignalSpec> {
        self.signals
            .iter()
            .enumerate()
            .map(|(i, s)| SignalSpec { tx_power_dbm: s.power_dbm, ..SignalSpec::new(i, s.rf_center_hz, s.bandwidth_hz, s.rat) })
            .collect()
    }

    pub fn search_space(&self) -> SearchSpace {
        SearchSpace {
            per_pair: self.search.per_pair,
            if_slots_hz: self.search.if_slots_hz.clone(),
            side: self.search.side,
        }
    }

    pub fn link_options(&self) -> LinkOptions {
        LinkOptions { fext: self.search.fext }
    }

    /// The explicit `[mapping]`, if any.
    pub fn explicit_mapping(&self) -> Option<roc_core::Result<Sf2sfMapping>> {
        let m = self.mapping.as_ref()?;
        Some((|| {
            let space = SpaceMap::from_assignment(&m.pairs, self.cable.num_pairs)?;
            let los = self
                .signals
                .iter()
                .zip(&m.if_hz)
                .enumerate()
                .map(|(i, (s, &f))| {
                    lo_for_slot(s.rf_center_hz, f, m.side).ok_or_else(|| {
                        roc_core::Error::Domain(format!("signal {i}: no LO puts it at IF {f} Hz"))
                    })
                })
                .collect::<roc_core::Result<Vec<_>>>()?;
            Ok(Sf2sfMapping {
                space,
                lo_plan: roc_core::link_algebra::LoPlan::matched(los),
                per_pair: self.search.per_pair,
            })
        })())
    }

    pub fn beam_scenario(&self) -> BeamScenario {
        let s = &self.scenario();
        BeamScenario {
            n_antennas: s.n_antennas,
            element_spacing_wavelengths: s.element_spacing_wavelengths,
            desired_theta_deg: s.desired_theta_deg,
            desired_power_dbm: s.desired_power_dbm,
            interferer_thetas_deg: s.interferer_thetas_deg.clone(),
            interferer_powers_dbm: s.interferer_powers_dbm.clone(),
            signal_bandwidth_hz: s.signal_bandwidth_hz,
            delta_hz: s.delta_hz,
            noise: NoiseModel {
                cable_noise_dbm_hz: self.noise.cable_noise_dbm_hz,
                antenna_noise_dbm_hz: self.noise.antenna_noise_dbm_hz,
            },
            sweep: ThetaSweep {
                min_deg: self.sweep.theta_min_deg,
                max_deg: self.sweep.theta_max_deg,
                step_deg: self.sweep.theta_step_deg,
            },
        }
    }

    pub fn waveform_spec(&self) -> WaveformSpec {
        let w = &self.waveform();
        let mut spec = WaveformSpec::for_rat(w.rat);
        if let Some(m) = w.modulation {
            spec.modulation = m;
        }
        if let Some(n) = w.n_symbols {
            spec.n_symbols = n;
        }
        spec.idle_symbols = w.idle_symbols;
        spec
    }

    /// EVM sweep with all streams derived from `seed`.
    pub fn evm_sweep(&self, link: &Link, seed: u64) -> roc_core::Result<EvmSweep> {
        let c = &self.chain();
        let chain = ImpairmentChain {
            noise_psd_dbm_hz: c.noise_psd_dbm_hz,
            nonlin_p1db_dbm: c.p1db_dbm,
            lo_detune_hz: c.lo_detune_hz,
            ..ImpairmentChain::from_link(&link.cable, &link.frontend, c.if_hz)?
        };
        let s = &self.sweep;
        Ok(EvmSweep {
            waveform: self.waveform_spec(),
            chain,
            tcxo: Tcxo { nominal_hz: c.tcxo_nominal_hz, stability_ppb: c.tcxo_stability_ppb },
            powers_dbm: power_grid(s.power_start_dbm, s.power_stop_dbm, s.power_step_db)?,
        }
        .with_seed(seed))
    }

    pub fn throughput_scenario(&self, link: &Link) -> roc_core::Result<ThroughputScenario> {
        let t = &self.throughput();
        let mcs = if t.mcs.is_empty() {
            (0..=McsTable::builtin(t.rat)?.max_mcs()).collect()
        } else {
            t.mcs.clone()
        };
        Ok(ThroughputScenario {
            cable: link.cable.clone(),
            frontend: link.frontend.clone(),
            rat: t.rat,
            bandwidth_hz: t.bandwidth_hz,
            power_dbm: t.power_dbm,
            rank: t.rank,
            noise_psd_dbm_hz: t.noise_psd_dbm_hz,
            if_hz: t.if_hz.clone(),
            mcs,
            interferer: t.interferer,
            model: ThroughputModel { rolloff_db: t.rolloff_db },
        })
    }
}

/// Schema and physics checks that need no experiment run. An empty list
/// means the configuration is usable.
pub fn validate_config(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let finite = |v: f64| v.is_finite();

    let c = &cfg.cable;
    if !(c.length_m >= 0.0) || !finite(c.length_m) {
        out.push(diag("cable.length_m", format!("must be a finite value >= 0, got {}", c.length_m)));
    }
    if c.num_pairs == 0 {
        out.push(diag("cable.num_pairs", "must be >= 1"));
    }
    if !c.pair_atten_scale.is_empty() && c.pair_atten_scale.len() != c.num_pairs {
        out.push(diag(
            "cable.pair_atten_scale",
            format!("has {} entries for {} pairs", c.pair_atten_scale.len(), c.num_pairs),
        ));
    }
    for (i, s) in c.pair_atten_scale.iter().enumerate() {
        if !(*s > 0.0) || !finite(*s) {
            out.push(diag(format!("cable.pair_atten_scale[{i}]"), format!("must be > 0, got {s}")));
        }
    }
    if !(c.fext_ref_hz > 0.0) || !finite(c.fext_ref_db) {
        out.push(diag("cable.fext_ref_hz", "FEXT reference needs a positive frequency and finite level"));
    }
    if !(c.velocity_factor > 0.0 && c.velocity_factor <= 1.0) {
        out.push(diag("cable.velocity_factor", format!("must lie in (0, 1], got {}", c.velocity_factor)));
    }

    let f = &cfg.frontend;
    if !(f.f_min_hz > 0.0 && f.f_max_hz > f.f_min_hz && finite(f.f_max_hz)) {
        out.push(diag(
            "frontend.f_min_hz",
            format!("passband must satisfy 0 < f_min_hz < f_max_hz, got ({}, {})", f.f_min_hz, f.f_max_hz),
        ));
    }
    if !(f.insertion_loss_db >= 0.0) || !finite(f.insertion_loss_db) {
        out.push(diag("frontend.insertion_loss_db", "must be a finite value >= 0"));
    }
    if f.edge_order == 0 {
        out.push(diag("frontend.edge_order", "must be >= 1"));
    }
    if !(f.equalizer_tilt_db_per_hz >= 0.0) {
        out.push(diag("frontend.equalizer_tilt_db_per_hz", "must be >= 0"));
    }
    let in_band = |lo: f64, hi: f64| lo >= f.f_min_hz && hi <= f.f_max_hz;

    if cfg.calibration.apply {
        if cfg.calibration.targets.len() < 2 {
            out.push(diag("calibration.targets", "need at least two targets"));
        }
        for (i, t) in cfg.calibration.targets.iter().enumerate() {
            if !(t.length_m >= 0.0) || !(t.f_if_hz > 0.0) || !finite(t.end_to_end_db) {
                out.push(diag(format!("calibration.targets[{i}]"), "needs length_m >= 0, f_if_hz > 0, finite loss"));
            }
        }
    }

    if !finite(cfg.noise.cable_noise_dbm_hz) {
        out.push(diag("noise.cable_noise_dbm_hz", "must be finite"));
    }
    if !finite(cfg.noise.antenna_noise_dbm_hz) {
        out.push(diag("noise.antenna_noise_dbm_hz", "must be finite"));
    }

    for (i, s) in cfg.signals.iter().enumerate() {
        if !(s.bandwidth_hz > 0.0) || !finite(s.bandwidth_hz) {
            out.push(diag(format!("signals[{i}].bandwidth_hz"), "must be > 0"));
        } else if !(s.rf_center_hz > s.bandwidth_hz / 2.0) || !finite(s.rf_center_hz) {
            out.push(diag(format!("signals[{i}].rf_center_hz"), "must exceed half the bandwidth"));
        }
        if !finite(s.power_dbm) || s.power_dbm > MAX_RF_INPUT_DBM {
            out.push(diag(
                format!("signals[{i}].power_dbm"),
                format!("{} dBm exceeds the +{MAX_RF_INPUT_DBM} dBm hard limit of the RF ports", s.power_dbm),
            ));
        }
    }

    let s = &cfg.search;
    if s.per_pair == 0 {
        out.push(diag("search.per_pair", "must be >= 1"));
    } else if cfg.signals.len() > s.per_pair * c.num_pairs {
        out.push(diag(
            "search.per_pair",
            format!("{} signals do not fit {} pairs of {} slots", cfg.signals.len(), c.num_pairs, s.per_pair),
        ));
    }
    let widest = cfg.signals.iter().map(|s| s.bandwidth_hz).fold(0.0, f64::max);
    for (k, &x) in s.if_slots_hz.iter().enumerate() {
        if !(x > 0.0) || !in_band(x - widest / 2.0, x + widest / 2.0) {
            out.push(diag(
                format!("search.if_slots_hz[{k}]"),
                format!("IF {x} Hz with {widest} Hz bandwidth is outside the front-end passband"),
            ));
        }
    }
    if let Scalarization::FixedTheta(t) = s.scalarization {
        if !(t.abs() <= 90.0) {
            out.push(diag("search.scalarization", "fixed-theta angle must lie in [-90, 90]"));
        }
    }

    if let Some(m) = &cfg.mapping {
        if m.pairs.len() != cfg.signals.len() || m.if_hz.len() != cfg.signals.len() {
            out.push(diag(
                "mapping",
                format!(
                    "pairs ({}) and if_hz ({}) need one entry per signal ({})",
                    m.pairs.len(),
                    m.if_hz.len(),
                    cfg.signals.len()
                ),
            ));
        }
        for (i, &p) in m.pairs.iter().enumerate() {
            if p >= c.num_pairs {
                out.push(diag(format!("mapping.pairs[{i}]"), format!("pair {p} out of range")));
            }
        }
    }

    if let Some(sc) = &cfg.scenario {
        if sc.n_antennas == 0 {
            out.push(diag("scenario.n_antennas", "must be >= 1"));
        }
        if sc.interferer_thetas_deg.len() != sc.interferer_powers_dbm.len() {
            out.push(diag("scenario.interferer_powers_dbm", "needs one power per interferer angle"));
        }
        for (k, t) in std::iter::once(&sc.desired_theta_deg).chain(&sc.interferer_thetas_deg).enumerate() {
            if !(t.abs() <= 90.0) {
                let key = if k == 0 { "scenario.desired_theta_deg".to_string() } else { format!("scenario.interferer_thetas_deg[{}]", k - 1) };
                out.push(diag(key, format!("angle {t} outside [-90, 90]")));
            }
        }
        if !(sc.signal_bandwidth_hz > 0.0) {
            out.push(diag("scenario.signal_bandwidth_hz", "must be > 0"));
        }
        if !(sc.element_spacing_wavelengths > 0.0) {
            out.push(diag("scenario.element_spacing_wavelengths", "must be > 0"));
        }
    }

    let sw = &cfg.sweep;
    if cfg.beam_scenario().sweep.thetas().is_err() {
        out.push(diag("sweep.theta_step_deg", "theta sweep needs -90 <= min <= max <= 90 and a positive step"));
    }
    if power_grid(sw.power_start_dbm, sw.power_stop_dbm, sw.power_step_db).is_err() {
        out.push(diag("sweep.power_step_db", "power sweep needs start <= stop and a positive step"));
    }

    if cfg.chain.is_some() || cfg.waveform.is_some() {
        let ch = &cfg.chain();
        let wf = cfg.waveform_spec();
        if let Err(e) = wf.validate() {
            out.push(diag("waveform", e.to_string()));
        }
        let half = wf.occupied_bandwidth_hz() / 2.0;
        if !in_band(ch.if_hz - half, ch.if_hz + half) {
            out.push(diag("chain.if_hz", format!("{} Hz is outside the front-end passband", ch.if_hz)));
        }
        if ch.noise_psd_dbm_hz.is_nan() || ch.p1db_dbm.is_nan() || !finite(ch.lo_detune_hz) {
            out.push(diag("chain", "noise, compression point and detune must be numbers"));
        }
        if !(ch.tcxo_nominal_hz > 0.0) || !(ch.tcxo_stability_ppb >= 0.0) {
            out.push(diag("chain.tcxo_stability_ppb", "TCXO needs a positive nominal and non-negative stability"));
        }
    }

    if let Some(t) = &cfg.throughput {
        let needed = t.rank as usize + usize::from(t.interferer.is_some());
        if t.rank == 0 || needed > c.num_pairs {
            out.push(diag("throughput.rank", format!("rank {} plus interferer needs {needed} pairs", t.rank)));
        }
        if !(t.bandwidth_hz > 0.0) {
            out.push(diag("throughput.bandwidth_hz", "must be > 0"));
        }
        if !finite(t.power_dbm) || t.power_dbm > MAX_RF_INPUT_DBM {
            out.push(diag(
                "throughput.power_dbm",
                format!("{} dBm exceeds the +{MAX_RF_INPUT_DBM} dBm hard limit of the RF ports", t.power_dbm),
            ));
        }
        if let Some(i) = &t.interferer {
            if !finite(i.power_dbm) || i.power_dbm > MAX_RF_INPUT_DBM {
                out.push(diag("throughput.interferer.power_dbm", format!("{} dBm exceeds the hard limit", i.power_dbm)));
            }
            if !(i.bandwidth_hz > 0.0) {
                out.push(diag("throughput.interferer.bandwidth_hz", "must be > 0"));
            }
        }
        for (k, &x) in t.if_hz.iter().enumerate() {
            if !in_band(x - t.bandwidth_hz / 2.0, x + t.bandwidth_hz / 2.0) {
                out.push(diag(format!("throughput.if_hz[{k}]"), format!("{x} Hz is outside the front-end passband")));
            }
        }
        match McsTable::builtin(t.rat) {
            Ok(table) => {
                for &m in &t.mcs {
                    if table.entry(m).is_err() {
                        out.push(diag("throughput.mcs", format!("MCS {m} not in the {} table", t.rat.name())));
                    }
                }
            }
            Err(e) => out.push(diag("throughput.rat", e.to_string())),
        }
        if !(t.rolloff_db >= 0.0) {
            out.push(diag("throughput.rolloff_db", "must be >= 0"));
        }
    }

    out
}
