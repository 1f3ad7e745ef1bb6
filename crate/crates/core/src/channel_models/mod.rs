//! Frequency-domain models of the copper medium and the passive L2CC chain.
//!
//! All responses are pure functions of their inputs and are reciprocal: the
//! same gain is used for downlink and uplink.

mod cable;
mod calibrate;
mod frontend;

pub use cable::{
    fext_gain, pair_gain, pair_insertion_gain, pair_insertion_loss_db, AttenCoeffs,
    CableCategory, CableSpec,
};
pub use calibrate::{calibrate_chain, end_to_end_loss_db, CalibrationFit, CalibrationTarget};
pub use frontend::{fit_equalizer_tilt, frontend_gain, FrontEndSpec, PhaseMode};

use serde::{Deserialize, Serialize};

/// White Gaussian noise floors of the chain.
///
/// `cable_noise_dbm_hz` is ingress on each pair, independent across pairs;
/// `antenna_noise_dbm_hz` is thermal noise at each RF port.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub cable_noise_dbm_hz: f64,
    pub antenna_noise_dbm_hz: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            cable_noise_dbm_hz: -140.0,
            antenna_noise_dbm_hz: -174.0,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> crate::Result<()> {
        if !self.cable_noise_dbm_hz.is_finite() || !self.antenna_noise_dbm_hz.is_finite() {
            return Err(crate::Error::Domain("noise floors must be finite".into()));
        }
        Ok(())
    }
}
