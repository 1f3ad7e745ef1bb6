//! Ready-made scenarios: the calibrated lab chains and the three studies
//! (beamforming over mappings, EVM versus input power, throughput versus
//! MCS). The CLI ships the same presets as config files.

use crate::beamforming::{BeamScenario, ThetaSweep};
use crate::channel_models::{
    calibrate_chain, CableCategory, CableSpec, CalibrationFit, CalibrationTarget, FrontEndSpec, NoiseModel,
};
use crate::link_algebra::{LinkOptions, Rat, SignalSpec};
use crate::sf2sf::{Scalarization, SearchSpace};
use crate::units::MHZ;
use crate::waveform_lab::{
    power_grid, EvmSweep, ImpairmentChain, Interferer, Tcxo, ThroughputModel, ThroughputScenario, WaveformSpec,
};
use crate::Result;

/// IF used for the single-signal lab link.
pub const LAB_IF_HZ: f64 = 140.0 * MHZ;
/// RF carrier of the lab WiMAX test signal.
pub const LAB_RF_HZ: f64 = 2630.0 * MHZ;
/// Receiver-referred noise floor of the analyzer setup.
pub const LAB_NOISE_FLOOR_DBM_HZ: f64 = -150.5;
/// Pair-to-pair equal-level FEXT at 100 MHz over 100 m; close to the
/// category 5e limit.
pub const LAB_FEXT_REF_DB: f64 = -18.0;

/// Experiment seed of the EVM sweeps.
pub const FIG6_SEED: u64 = 6;

/// Measured end-to-end attenuation of the two lab cables at 140 MHz.
pub fn lab_targets() -> Vec<CalibrationTarget> {
    vec![
        CalibrationTarget { length_m: 50.0, f_if_hz: LAB_IF_HZ, end_to_end_db: 50.0 },
        CalibrationTarget { length_m: 15.0, f_if_hz: LAB_IF_HZ, end_to_end_db: 42.0 },
    ]
}

pub fn lab_frontend() -> FrontEndSpec {
    FrontEndSpec::new(50.0 * MHZ, 450.0 * MHZ, 20.0)
}

pub fn lab_cable(length_m: f64) -> CableSpec {
    CableSpec {
        fext_ref_db: LAB_FEXT_REF_DB,
        ..CableSpec::new(CableCategory::Cat5e, length_m, 4)
    }
}

/// Cable and front-end calibrated on [`lab_targets`], cable cut to
/// `length_m`.
pub fn calibrated(length_m: f64) -> Result<(CableSpec, FrontEndSpec, CalibrationFit)> {
    let fit = calibrate_chain(&lab_targets(), &lab_cable(length_m), &lab_frontend())?;
    let (c, f) = fit.apply(&lab_cable(length_m), &lab_frontend());
    Ok((c, f, fit))
}

/// Beamforming study over every SF2SF mapping of 8 antennas onto 4 pairs.
#[derive(Clone, Debug)]
pub struct MappingStudy {
    pub signals: Vec<SignalSpec>,
    pub cable: CableSpec,
    pub frontend: FrontEndSpec,
    pub scenario: BeamScenario,
    pub space: SearchSpace,
    pub opts: LinkOptions,
    pub scalarization: Scalarization,
}

pub fn fig5() -> Result<MappingStudy> {
    let (mut cable, frontend, _) = calibrated(50.0)?;
    cable.pair_atten_scale = vec![1.0, 1.25, 1.5, 1.9];
    let signals = (0..8).map(|i| SignalSpec::new(i, 2595.0 * MHZ, 20.0 * MHZ, Rat::Lte)).collect();
    let scenario = BeamScenario {
        n_antennas: 8,
        element_spacing_wavelengths: 0.5,
        desired_theta_deg: 0.0,
        desired_power_dbm: -20.0,
        interferer_thetas_deg: vec![-40.0, 25.0],
        interferer_powers_dbm: vec![-20.0, -20.0],
        signal_bandwidth_hz: 20.0 * MHZ,
        delta_hz: 0.0,
        noise: NoiseModel::default(),
        sweep: ThetaSweep { min_deg: -90.0, max_deg: 90.0, step_deg: 1.0 },
    };
    Ok(MappingStudy {
        signals,
        cable,
        frontend,
        scenario,
        space: SearchSpace {
            per_pair: 2,
            if_slots_hz: vec![75.0 * MHZ, 175.0 * MHZ],
            ..SearchSpace::default()
        },
        opts: LinkOptions { fext: true },
        scalarization: Scalarization::Mean,
    })
}

/// EVM/power sweep of the WiMAX test signal through the calibrated chain.
pub fn fig6(length_m: f64) -> Result<EvmSweep> {
    let (cable, fe, _) = calibrated(length_m)?;
    let mut chain = ImpairmentChain::from_link(&cable, &fe, LAB_IF_HZ)?;
    chain.noise_psd_dbm_hz = LAB_NOISE_FLOOR_DBM_HZ;
    chain.nonlin_p1db_dbm = 5.0;
    chain.lo_detune_hz = -4183.0;
    Ok(EvmSweep {
        waveform: WaveformSpec::wimax(),
        chain,
        tcxo: Tcxo::default(),
        powers_dbm: power_grid(-30.0, 5.0, 1.0)?,
    }
    .with_seed(FIG6_SEED))
}

/// 2-layer LTE downlink with and without a WiFi signal on the adjacent pair.
pub fn fig7() -> Result<ThroughputScenario> {
    let (cable, frontend, _) = calibrated(50.0)?;
    Ok(ThroughputScenario {
        cable,
        frontend,
        rat: Rat::Lte,
        bandwidth_hz: 5.0 * MHZ,
        power_dbm: -5.0,
        rank: 2,
        noise_psd_dbm_hz: LAB_NOISE_FLOOR_DBM_HZ,
        if_hz: vec![75.0 * MHZ, 175.0 * MHZ],
        mcs: (0..=28).collect(),
        interferer: Some(Interferer { rat: Rat::Wifi, power_dbm: 5.0, bandwidth_hz: 20.0 * MHZ }),
        model: ThroughputModel::default(),
    })
}
