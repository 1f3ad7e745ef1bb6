//! End-to-end signal model `s' = A s + B w_c`.
//!
//! Each RF signal is down-converted to its IF, filtered by the near-end
//! front-end, carried over its twisted pair (plus FEXT into the other pairs),
//! filtered by the far-end front-end and up-converted again. [`LinkModel`]
//! evaluates the resulting `N×N` matrix `A(δ)` and `N×L` matrix `B(δ)` at
//! baseband offsets `δ`; [`tone_oracle`] recomputes the same quantities by
//! explicit cosine mixing of spectral lines and is used to cross-check it.

mod effective;
mod oracle;

pub use effective::{
    default_grid, output_noise_psd, ChannelSnapshot, EffectiveChannel, LinkModel, LinkOptions,
    NoiseCoherence,
};
pub use oracle::{propagate_tones, tone_oracle, tone_oracle_cross, Line, ToneInput};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hard limit on the RF input power of a port.
pub const MAX_RF_INPUT_DBM: f64 = 5.0;
/// Recommended maximum RF input power; above it mixer non-linearity shows.
pub const RECOMMENDED_RF_INPUT_DBM: f64 = 0.0;

/// Conversion gain of one mixer stage in the assembled model. An ideal
/// cosine mixer passes half the amplitude into each sideband; those
/// 2×(-6 dB) are part of the calibrated front-end insertion loss, so the
/// assembler uses unit conversion gain.
pub const MIXER_CONVERSION_GAIN: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rat {
    Lte,
    Wimax,
    Wifi,
    Generic,
}

impl Rat {
    pub fn name(self) -> &'static str {
        match self {
            Rat::Lte => "lte",
            Rat::Wimax => "wimax",
            Rat::Wifi => "wifi",
            Rat::Generic => "generic",
        }
    }
}

/// One RF signal at an antenna port.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub id: usize,
    pub rf_center_hz: f64,
    pub bandwidth_hz: f64,
    pub rat: Rat,
    pub tx_power_dbm: f64,
}

impl SignalSpec {
    pub fn new(id: usize, rf_center_hz: f64, bandwidth_hz: f64, rat: Rat) -> Self {
        Self {
            id,
            rf_center_hz,
            bandwidth_hz,
            rat,
            tx_power_dbm: RECOMMENDED_RF_INPUT_DBM,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Domain(format!(
                "signal {}: bandwidth must be > 0",
                self.id
            )));
        }
        if !(self.rf_center_hz > self.bandwidth_hz / 2.0) {
            return Err(Error::Domain(format!(
                "signal {}: RF center must exceed half the bandwidth",
                self.id
            )));
        }
        if !self.tx_power_dbm.is_finite() || self.tx_power_dbm > MAX_RF_INPUT_DBM {
            return Err(Error::Domain(format!(
                "signal {}: input power {} dBm exceeds the +{} dBm hard limit",
                self.id, self.tx_power_dbm, MAX_RF_INPUT_DBM
            )));
        }
        if self.tx_power_dbm > RECOMMENDED_RF_INPUT_DBM {
            log::warn!(
                "signal {}: input power {} dBm above the recommended {} dBm",
                self.id,
                self.tx_power_dbm,
                RECOMMENDED_RF_INPUT_DBM
            );
        }
        Ok(())
    }
}

/// Down- and up-conversion LO frequencies, one per signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoPlan {
    pub f_down_hz: Vec<f64>,
    pub f_up_hz: Vec<f64>,
    /// Permit `f_down != f_up` (carrier-frequency-error studies).
    #[serde(default)]
    pub allow_detune: bool,
}

impl LoPlan {
    /// Nominal plan with matched LOs at both ends.
    pub fn matched(f_lo_hz: Vec<f64>) -> Self {
        Self {
            f_up_hz: f_lo_hz.clone(),
            f_down_hz: f_lo_hz,
            allow_detune: false,
        }
    }

    pub fn len(&self) -> usize {
        self.f_down_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_down_hz.is_empty()
    }
}

/// IF center and spectral orientation after mixing `rf` with `lo`.
///
/// High-side injection (`lo > rf`) mirrors the spectrum.
pub fn if_of(rf_center_hz: f64, f_lo_hz: f64) -> Result<(f64, bool)> {
    if rf_center_hz == f_lo_hz {
        return Err(Error::Domain(format!(
            "LO equals RF ({rf_center_hz} Hz): zero-IF is not supported"
        )));
    }
    Ok(((f_lo_hz - rf_center_hz).abs(), f_lo_hz > rf_center_hz))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lab_if_plan() {
        let (f, inv) = if_of(2.63e9, 2.77e9).unwrap();
        assert!((f - 140.0e6).abs() < 1e-3);
        assert!(inv);
        let (f, inv) = if_of(2.77e9, 2.63e9).unwrap();
        assert!((f - 140.0e6).abs() < 1e-3);
        assert!(!inv);
    }

    #[test]
    fn double_conversion_cancels_inversion() {
        let (rf, lo) = (2.63e9, 2.63e9 + 75.0e6);
        let (f_if, inv_down) = if_of(rf, lo).unwrap();
        // the up-converter selects the line on the RF side of the same LO
        let out = if inv_down { lo - f_if } else { lo + f_if };
        let (_, inv_up) = if_of(out, lo).unwrap();
        assert_eq!(inv_down, inv_up);
        assert!(!(inv_down ^ inv_up));
        assert!((out - rf).abs() < 1e-3);
    }

    #[test]
    fn zero_if_rejected() {
        assert!(if_of(1.0e9, 1.0e9).is_err());
    }

    #[test]
    fn power_limits() {
        let mut s = SignalSpec::new(1, 2.6e9, 20e6, Rat::Lte);
        s.tx_power_dbm = 6.0;
        assert!(s.validate().is_err());
        s.tx_power_dbm = 3.0;
        assert!(s.validate().is_ok());
        s.rf_center_hz = 5e6;
        assert!(s.validate().is_err());
    }
}
