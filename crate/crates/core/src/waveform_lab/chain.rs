use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel_models::{end_to_end_loss_db, CableSpec, FrontEndSpec};
use crate::seeds;
use crate::units::{db_to_amplitude, dbm_to_mw};
use crate::{Error, Result};

/// `|g(A)|²` at the 1 dB compression point of a `p = 1` Rapp limiter is
/// `10^(-0.1)`, so `(A/A_sat)² = 10^(0.1) - 1` there.
const RAPP_P1DB_RATIO: f64 = 0.258_925_411_794_167_2;

/// Passive chain seen by one RF signal, applied in order: input scaling,
/// soft limiter, linear gain, output noise, LO detune.
///
/// Sample amplitudes are in `√mW`, so `|x|²` is power in mW.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpairmentChain {
    pub gain_db: f64,
    /// Output-referred white noise; `-inf` disables it.
    pub noise_psd_dbm_hz: f64,
    /// Input-referred 1 dB compression point; `+inf` disables the limiter.
    pub nonlin_p1db_dbm: f64,
    /// Residual `f_U - f_D`.
    pub lo_detune_hz: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
}

impl Default for ImpairmentChain {
    fn default() -> Self {
        Self {
            gain_db: 0.0,
            noise_psd_dbm_hz: f64::NEG_INFINITY,
            nonlin_p1db_dbm: f64::INFINITY,
            lo_detune_hz: 0.0,
            sample_rate_hz: 16e6,
            seed: 0,
        }
    }
}

impl ImpairmentChain {
    /// Chain whose gain is the modeled end-to-end loss at `f_if_hz`.
    pub fn from_link(cable: &CableSpec, fe: &FrontEndSpec, f_if_hz: f64) -> Result<Self> {
        Ok(Self {
            gain_db: -end_to_end_loss_db(cable, fe, f_if_hz)?,
            ..Self::default()
        })
    }

    pub fn validate(&self, occupied_bandwidth_hz: f64) -> Result<()> {
        if !self.gain_db.is_finite() || !self.lo_detune_hz.is_finite() {
            return Err(Error::Domain("chain gain and detune must be finite".into()));
        }
        if self.noise_psd_dbm_hz.is_nan() || self.nonlin_p1db_dbm.is_nan() {
            return Err(Error::Domain("chain noise and compression point must not be NaN".into()));
        }
        if !(self.sample_rate_hz >= 2.0 * occupied_bandwidth_hz) {
            return Err(Error::Domain(format!(
                "sample rate {} Hz is below twice the occupied bandwidth {occupied_bandwidth_hz} Hz",
                self.sample_rate_hz
            )));
        }
        Ok(())
    }

    /// Saturation amplitude of the limiter in `√mW`.
    pub fn saturation_amplitude(&self) -> f64 {
        (dbm_to_mw(self.nonlin_p1db_dbm) / RAPP_P1DB_RATIO).sqrt()
    }

    /// Total noise variance per complex sample, mW.
    pub fn noise_variance(&self) -> f64 {
        dbm_to_mw(self.noise_psd_dbm_hz) * self.sample_rate_hz
    }
}

/// Rapp soft limiter with smoothness 1: `A / √(1 + (A/A_sat)²)`, phase kept.
pub fn soft_limit(x: Complex64, a_sat: f64) -> Complex64 {
    let r = x.norm() / a_sat;
    x / (1.0 + r * r).sqrt()
}

/// Runs unit-power samples `x` through the chain at `input_power_dbm`.
///
/// The noise stream depends only on `chain.seed`, so sweeping the input
/// power reuses one noise realization.
pub fn apply_chain(x: &[Complex64], chain: &ImpairmentChain, input_power_dbm: f64) -> Result<Vec<Complex64>> {
    if x.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
        return Err(Error::Domain("input samples must be finite".into()));
    }
    if !input_power_dbm.is_finite() {
        return Err(Error::Domain("input power must be finite".into()));
    }
    let scale = dbm_to_mw(input_power_dbm).sqrt();
    let gain = db_to_amplitude(chain.gain_db);
    let limit = chain.nonlin_p1db_dbm.is_finite().then(|| chain.saturation_amplitude());
    let mut y: Vec<Complex64> = x
        .iter()
        .map(|&s| {
            let v = s * scale;
            let v = match limit {
                Some(a) => soft_limit(v, a),
                None => v,
            };
            v * gain
        })
        .collect();

    let var = chain.noise_variance();
    if var > 0.0 {
        let sigma = (var / 2.0).sqrt();
        let mut rng = seeds::rng(chain.seed, "awgn", 0);
        for s in &mut y {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *s += Complex64::new(re, im) * sigma;
        }
    }
    if chain.lo_detune_hz != 0.0 {
        let w = 2.0 * PI * chain.lo_detune_hz / chain.sample_rate_hz;
        for (n, s) in y.iter_mut().enumerate() {
            *s *= Complex64::from_polar(1.0, w * n as f64);
        }
    }
    Ok(y)
}
