use serde::{Deserialize, Serialize};

use crate::channel_models::NoiseModel;
use crate::{Error, Result};

/// Inclusive, uniformly spaced angle grid in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSweep {
    pub min_deg: f64,
    pub max_deg: f64,
    pub step_deg: f64,
}

impl Default for ThetaSweep {
    fn default() -> Self {
        Self {
            min_deg: -90.0,
            max_deg: 90.0,
            step_deg: 1.0,
        }
    }
}

impl ThetaSweep {
    pub fn thetas(&self) -> Result<Vec<f64>> {
        let ok = self.min_deg.is_finite()
            && self.max_deg.is_finite()
            && self.step_deg > 0.0
            && self.min_deg <= self.max_deg
            && self.min_deg >= -90.0
            && self.max_deg <= 90.0;
        if !ok {
            return Err(Error::Domain(format!("invalid theta sweep {self:?}")));
        }
        let n = ((self.max_deg - self.min_deg) / self.step_deg + 1e-9).floor() as usize + 1;
        Ok((0..n)
            .map(|i| (self.min_deg + i as f64 * self.step_deg).min(self.max_deg))
            .collect())
    }
}

/// Uplink array scenario. Powers are at the antenna ports, integrated over
/// `signal_bandwidth_hz`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamScenario {
    pub n_antennas: usize,
    /// Element spacing in wavelengths.
    pub element_spacing_wavelengths: f64,
    pub desired_theta_deg: f64,
    pub desired_power_dbm: f64,
    pub interferer_thetas_deg: Vec<f64>,
    pub interferer_powers_dbm: Vec<f64>,
    pub signal_bandwidth_hz: f64,
    /// Baseband offset at which `A` and `B` are evaluated.
    pub delta_hz: f64,
    pub noise: NoiseModel,
    pub sweep: ThetaSweep,
}

impl Default for BeamScenario {
    fn default() -> Self {
        Self {
            n_antennas: 8,
            element_spacing_wavelengths: 0.5,
            desired_theta_deg: 0.0,
            desired_power_dbm: -60.0,
            interferer_thetas_deg: vec![-40.0, 25.0],
            interferer_powers_dbm: vec![-60.0, -60.0],
            signal_bandwidth_hz: 20e6,
            delta_hz: 0.0,
            noise: NoiseModel::default(),
            sweep: ThetaSweep::default(),
        }
    }
}

impl BeamScenario {
    pub fn validate(&self) -> Result<()> {
        if self.n_antennas == 0 {
            return Err(Error::Domain("scenario needs at least one antenna".into()));
        }
        if !(self.element_spacing_wavelengths > 0.0) {
            return Err(Error::Domain("element spacing must be positive".into()));
        }
        if self.interferer_thetas_deg.len() != self.interferer_powers_dbm.len() {
            return Err(Error::Domain(format!(
                "{} interferer angles but {} powers",
                self.interferer_thetas_deg.len(),
                self.interferer_powers_dbm.len()
            )));
        }
        let angles = std::iter::once(&self.desired_theta_deg).chain(&self.interferer_thetas_deg);
        for t in angles {
            if !(t.abs() <= 90.0) {
                return Err(Error::Domain(format!("angle {t} outside [-90, 90]")));
            }
        }
        if !(self.signal_bandwidth_hz > 0.0) {
            return Err(Error::Domain("signal bandwidth must be positive".into()));
        }
        if !self.desired_power_dbm.is_finite()
            || self.interferer_powers_dbm.iter().any(|p| !p.is_finite())
        {
            return Err(Error::Domain("powers must be finite".into()));
        }
        self.noise.validate()?;
        self.sweep.thetas()?;
        Ok(())
    }
}

/// SINR versus desired-UE angle for one mapping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinrCurve {
    pub theta_deg: Vec<f64>,
    pub sinr_db: Vec<f64>,
    pub mapping_id: String,
}

impl SinrCurve {
    /// Value at the grid angle nearest to `theta_deg`.
    pub fn at(&self, theta_deg: f64) -> Option<f64> {
        let i = self
            .theta_deg
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - theta_deg).abs().total_cmp(&(b.1 - theta_deg).abs()))?
            .0;
        Some(self.sinr_db[i])
    }

    pub fn mean_db(&self) -> f64 {
        self.sinr_db.iter().sum::<f64>() / self.sinr_db.len() as f64
    }

    pub fn min_db(&self) -> f64 {
        self.sinr_db.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> std::io::Result<()> {
        write_sinr_csv(std::slice::from_ref(self), w)
    }

    fn write_rows<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (t, s) in self.theta_deg.iter().zip(&self.sinr_db) {
            writeln!(w, "{t},{s},{}", self.mapping_id)?;
        }
        Ok(())
    }
}

pub const SINR_CSV_HEADER: &str = "theta_deg,sinr_db,mapping_id";

/// Several curves in one table, one block per curve.
pub fn write_sinr_csv<W: std::io::Write>(curves: &[SinrCurve], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SINR_CSV_HEADER}")?;
    for c in curves {
        c.write_rows(&mut w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive_and_increasing() {
        let g = ThetaSweep { min_deg: -90.0, max_deg: 90.0, step_deg: 0.5 }.thetas().unwrap();
        assert_eq!(g.len(), 361);
        assert_eq!(*g.last().unwrap(), 90.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(ThetaSweep { min_deg: -91.0, max_deg: 0.0, step_deg: 1.0 }.thetas().is_err());
        assert!(ThetaSweep { min_deg: 0.0, max_deg: 1.0, step_deg: 0.0 }.thetas().is_err());
    }

    #[test]
    fn default_is_valid() {
        BeamScenario::default().validate().unwrap();
        let bad = BeamScenario { interferer_powers_dbm: vec![0.0], ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn nearest_lookup() {
        let c = SinrCurve {
            theta_deg: vec![-1.0, 0.0, 1.0],
            sinr_db: vec![3.0, 4.0, 5.0],
            mapping_id: "m".into(),
        };
        assert_eq!(c.at(0.7), Some(5.0));
        assert_eq!(c.min_db(), 3.0);
        assert!((c.mean_db() - 4.0).abs() < 1e-12);
    }
}
