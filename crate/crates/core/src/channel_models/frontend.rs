use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cable::{pair_insertion_loss_db, CableSpec};
use crate::units::db_to_amplitude;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    #[default]
    Zero,
    MinimumPhase,
}

/// Lumped passive chain of one L2CC signal slice: mixer, resistive combiner,
/// RC cable equalizer and balun, traversed once per cable end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontEndSpec {
    /// `(f_min, f_max)` of the IF passband, -3 dB edges.
    pub passband_hz: (f64, f64),
    pub insertion_loss_db: f64,
    pub edge_order: u32,
    pub equalizer_tilt_db_per_hz: f64,
    pub design_length_m: f64,
    #[serde(default)]
    pub phase: PhaseMode,
}

impl FrontEndSpec {
    pub fn new(f_min: f64, f_max: f64, insertion_loss_db: f64) -> Self {
        Self {
            passband_hz: (f_min, f_max),
            insertion_loss_db,
            edge_order: 4,
            equalizer_tilt_db_per_hz: 0.0,
            design_length_m: 0.0,
            phase: PhaseMode::Zero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.passband_hz;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Domain(format!(
                "passband must satisfy 0 < f_min < f_max, got ({lo}, {hi})"
            )));
        }
        if !(self.insertion_loss_db >= 0.0) {
            return Err(Error::Domain("front-end insertion loss must be >= 0 dB".into()));
        }
        if self.edge_order == 0 {
            return Err(Error::Domain("edge order must be >= 1".into()));
        }
        if !(self.equalizer_tilt_db_per_hz >= 0.0) {
            return Err(Error::Domain("equalizer tilt must be >= 0".into()));
        }
        Ok(())
    }

    pub fn center_hz(&self) -> f64 {
        (self.passband_hz.0 * self.passband_hz.1).sqrt()
    }

    pub fn contains(&self, lo: f64, hi: f64) -> bool {
        lo >= self.passband_hz.0 && hi <= self.passband_hz.1
    }

    /// Normalized lowpass-prototype frequency of the bandpass transform;
    /// `±1` at the band edges, `0` at the geometric center.
    fn prototype_x(&self, f_hz: f64) -> f64 {
        let (lo, hi) = self.passband_hz;
        let f0sq = lo * hi;
        (f_hz * f_hz - f0sq) / (f_hz * (hi - lo))
    }

    /// Butterworth skirt response (unit gain at the center).
    pub(crate) fn skirt(&self, f_hz: f64) -> Complex64 {
        if f_hz <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = self.prototype_x(f_hz);
        let n = self.edge_order as i32;
        match self.phase {
            PhaseMode::Zero => Complex64::new(1.0 / (1.0 + x.powi(2 * n)).sqrt(), 0.0),
            PhaseMode::MinimumPhase => {
                let jx = Complex64::new(0.0, x);
                (1..=n).fold(Complex64::new(1.0, 0.0), |acc, k| {
                    let theta = PI * (2 * k + n - 1) as f64 / (2 * n) as f64;
                    acc / (jx - Complex64::from_polar(1.0, theta))
                })
            }
        }
    }

    /// Equalizer up-tilt in dB; flat outside the passband.
    pub(crate) fn tilt_db(&self, f_hz: f64) -> f64 {
        let (lo, hi) = self.passband_hz;
        self.equalizer_tilt_db_per_hz * (f_hz.clamp(lo, hi) - lo)
    }
}

/// Complex gain of one front-end traversal; `|gain| <= 1` everywhere.
pub fn frontend_gain(f_hz: f64, fe: &FrontEndSpec) -> Result<Complex64> {
    if !(f_hz >= 0.0) {
        return Err(Error::Domain(format!("frequency must be >= 0, got {f_hz}")));
    }
    let flat = db_to_amplitude(fe.tilt_db(f_hz) - fe.insertion_loss_db).min(1.0);
    Ok(fe.skirt(f_hz) * flat)
}

/// Least-squares linear tilt (dB/Hz) that flattens pair `pair` of `cable`
/// over `band`, divided evenly across `traversals` front-ends.
pub fn fit_equalizer_tilt(cable: &CableSpec, pair: usize, band: (f64, f64), traversals: u32) -> f64 {
    let n = 201;
    let (lo, hi) = band;
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let f = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            (f, pair_insertion_loss_db(f, pair, cable))
        })
        .collect();
    let mf = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxy: f64 = pts.iter().map(|(f, l)| (f - mf) * (l - ml)).sum();
    let sxx: f64 = pts.iter().map(|(f, _)| (f - mf) * (f - mf)).sum();
    (sxy / sxx).max(0.0) / traversals.max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::{pair_gain, CableCategory};
    use crate::units::{amplitude_to_db, MHZ};

    #[test]
    fn center_gain_is_insertion_loss() {
        let fe = FrontEndSpec::new(50.0 * MHZ, 450.0 * MHZ, 6.0);
        let g = frontend_gain(fe.center_hz(), &fe).unwrap().norm();
        assert!((g - 0.501).abs() / 0.501 < 0.01);
    }

    #[test]
    fn skirt_suppression_far_above_band() {
        for order in 1..=6 {
            for (lo, hi) in [(50.0, 450.0), (10.0, 600.0), (100.0, 120.0)] {
                let mut fe = FrontEndSpec::new(lo * MHZ, hi * MHZ, 3.0);
                fe.edge_order = order;
                let c = frontend_gain(fe.center_hz(), &fe).unwrap().norm();
                let s = frontend_gain(10.0 * hi * MHZ, &fe).unwrap().norm();
                assert!(amplitude_to_db(c / s) >= 20.0 * order as f64);
            }
        }
    }

    #[test]
    fn minimum_phase_matches_zero_phase_magnitude() {
        let mut a = FrontEndSpec::new(50.0 * MHZ, 450.0 * MHZ, 4.0);
        a.edge_order = 3;
        let mut b = a.clone();
        b.phase = PhaseMode::MinimumPhase;
        let center = frontend_gain(a.center_hz(), &b).unwrap();
        assert!(center.arg().abs() < 1e-12);
        for f in [1.0, 20.0, 50.0, 150.0, 449.0, 900.0, 5000.0] {
            let ga = frontend_gain(f * MHZ, &a).unwrap();
            let gb = frontend_gain(f * MHZ, &b).unwrap();
            assert!((ga.norm() - gb.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn passive_with_large_tilt() {
        let mut fe = FrontEndSpec::new(50.0 * MHZ, 450.0 * MHZ, 2.0);
        fe.equalizer_tilt_db_per_hz = 30.0 / (400.0 * MHZ);
        for i in 0..2000 {
            let f = i as f64 * 1.0 * MHZ;
            assert!(frontend_gain(f, &fe).unwrap().norm() <= 1.0);
        }
    }

    #[test]
    fn center_beats_out_of_band() {
        let fe = FrontEndSpec::new(50.0 * MHZ, 450.0 * MHZ, 2.0);
        let c = frontend_gain(fe.center_hz(), &fe).unwrap().norm();
        for f in [0.0, 1.0, 10.0, 49.0, 451.0, 1000.0, 3000.0] {
            assert!(frontend_gain(f * MHZ, &fe).unwrap().norm() <= c);
        }
    }

    #[test]
    fn fitted_tilt_flattens_50m_cat5e() {
        let cable = CableSpec::new(CableCategory::Cat5e, 50.0, 4);
        let band = (50.0 * MHZ, 400.0 * MHZ);
        let mut fe = FrontEndSpec::new(20.0 * MHZ, 600.0 * MHZ, 0.0);
        fe.edge_order = 2;
        fe.design_length_m = 50.0;
        // the whole up-tilt lives in one equalizer; start from 20 dB loss so
        // the tilt never hits the passivity clamp
        fe.insertion_loss_db = 20.0;
        fe.equalizer_tilt_db_per_hz = fit_equalizer_tilt(&cable, 0, band, 1);
        assert!(fe.equalizer_tilt_db_per_hz > 0.0);
        let cascade: Vec<f64> = (0..=350)
            .map(|i| {
                let f = band.0 + i as f64 * MHZ;
                let g = pair_gain(f, 0, &cable).unwrap() * frontend_gain(f, &fe).unwrap();
                amplitude_to_db(g.norm())
            })
            .collect();
        let max = cascade.iter().cloned().fold(f64::MIN, f64::max);
        let min = cascade.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max - min <= 3.0, "ripple {}", max - min);
    }
}
