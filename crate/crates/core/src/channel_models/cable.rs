use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::seeds;
use crate::units::{db_to_amplitude, MHZ, SPEED_OF_LIGHT};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CableCategory {
    Cat5,
    Cat5e,
    Cat6,
    Cat7,
}

impl CableCategory {
    /// Published channel insertion-loss coefficients (dB per 100 m, f in MHz).
    pub fn default_coeffs(self) -> AttenCoeffs {
        match self {
            CableCategory::Cat5 | CableCategory::Cat5e => AttenCoeffs::new(1.967, 0.023, 0.050),
            CableCategory::Cat6 => AttenCoeffs::new(1.808, 0.017, 0.200),
            CableCategory::Cat7 => AttenCoeffs::new(1.800, 0.010, 0.200),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CableCategory::Cat5 => "cat5",
            CableCategory::Cat5e => "cat5e",
            CableCategory::Cat6 => "cat6",
            CableCategory::Cat7 => "cat7",
        }
    }
}

/// Insertion-loss polynomial `k1·√f + k2·f + k3/√f` in dB per 100 m, f in MHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttenCoeffs {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl AttenCoeffs {
    pub const fn new(k1: f64, k2: f64, k3: f64) -> Self {
        Self { k1, k2, k3 }
    }

    pub const ZERO: AttenCoeffs = AttenCoeffs::new(0.0, 0.0, 0.0);

    pub fn scaled(self, s: f64) -> Self {
        Self::new(self.k1 * s, self.k2 * s, self.k3 * s)
    }

    /// Loss in dB per 100 m. At DC only the `k2` term survives, which is zero.
    pub fn loss_db_per_100m(&self, f_hz: f64) -> f64 {
        if f_hz <= 0.0 {
            return 0.0;
        }
        let f = f_hz / MHZ;
        let r = f.sqrt();
        self.k1 * r + self.k2 * f + self.k3 / r
    }
}

/// A multi-pair LAN cable.
///
/// `pair_atten_scale` multiplies the insertion loss (in dB) of each pair and
/// models pair-to-pair heterogeneity; an empty vector means all pairs are
/// nominal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CableSpec {
    pub category: CableCategory,
    pub length_m: f64,
    pub num_pairs: usize,
    pub atten: AttenCoeffs,
    pub pair_atten_scale: Vec<f64>,
    /// FEXT coupling in dB at `fext_ref_hz` over 100 m, before insertion loss.
    pub fext_ref_db: f64,
    pub fext_ref_hz: f64,
    pub noise_floor_dbm_hz: f64,
    pub velocity_factor: f64,
    pub fext_seed: u64,
}

impl CableSpec {
    pub fn new(category: CableCategory, length_m: f64, num_pairs: usize) -> Self {
        Self {
            category,
            length_m,
            num_pairs,
            atten: category.default_coeffs(),
            pair_atten_scale: Vec::new(),
            fext_ref_db: -40.0,
            fext_ref_hz: 100.0 * MHZ,
            noise_floor_dbm_hz: -140.0,
            velocity_factor: 0.69,
            fext_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_m >= 0.0) || !self.length_m.is_finite() {
            return Err(Error::Domain(format!(
                "cable length must be >= 0, got {}",
                self.length_m
            )));
        }
        if self.num_pairs == 0 {
            return Err(Error::Domain("cable needs at least one pair".into()));
        }
        let AttenCoeffs { k1, k2, k3 } = self.atten;
        if [k1, k2, k3].iter().any(|k| !(*k >= 0.0)) {
            return Err(Error::Domain("attenuation coefficients must be >= 0".into()));
        }
        if !(self.velocity_factor > 0.0 && self.velocity_factor <= 1.0) {
            return Err(Error::Domain(format!(
                "velocity factor must lie in (0, 1], got {}",
                self.velocity_factor
            )));
        }
        if !(self.fext_ref_hz > 0.0) {
            return Err(Error::Domain("FEXT reference frequency must be > 0".into()));
        }
        if !self.pair_atten_scale.is_empty() {
            if self.pair_atten_scale.len() != self.num_pairs {
                return Err(Error::Domain(format!(
                    "pair_atten_scale has {} entries for {} pairs",
                    self.pair_atten_scale.len(),
                    self.num_pairs
                )));
            }
            if self.pair_atten_scale.iter().any(|s| !(*s >= 0.0)) {
                return Err(Error::Domain("pair attenuation scales must be >= 0".into()));
            }
        }
        Ok(())
    }

    pub fn pair_scale(&self, pair: usize) -> f64 {
        self.pair_atten_scale.get(pair).copied().unwrap_or(1.0)
    }

    /// One-way propagation delay in seconds.
    pub fn delay_s(&self) -> f64 {
        self.length_m / (self.velocity_factor * SPEED_OF_LIGHT)
    }

    fn delay_phasor(&self, f_hz: f64) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * PI * f_hz * self.delay_s())
    }
}

fn check_freq(f_hz: f64) -> Result<()> {
    if !(f_hz >= 0.0) || !f_hz.is_finite() {
        return Err(Error::Domain(format!("frequency must be >= 0, got {f_hz}")));
    }
    Ok(())
}

/// Insertion loss in dB (positive) of one pair.
pub fn pair_insertion_loss_db(f_hz: f64, pair: usize, cable: &CableSpec) -> f64 {
    cable.atten.loss_db_per_100m(f_hz) * cable.length_m / 100.0 * cable.pair_scale(pair)
}

/// Complex gain of a nominal pair: polynomial magnitude and linear phase.
pub fn pair_insertion_gain(f_hz: f64, cable: &CableSpec) -> Result<Complex64> {
    check_freq(f_hz)?;
    let loss = cable.atten.loss_db_per_100m(f_hz) * cable.length_m / 100.0;
    Ok(cable.delay_phasor(f_hz) * db_to_amplitude(-loss).min(1.0))
}

/// Complex gain of pair `pair`, including its heterogeneity scale.
pub fn pair_gain(f_hz: f64, pair: usize, cable: &CableSpec) -> Result<Complex64> {
    check_freq(f_hz)?;
    if pair >= cable.num_pairs {
        return Err(Error::Domain(format!(
            "pair {pair} out of range for {} pairs",
            cable.num_pairs
        )));
    }
    let loss = pair_insertion_loss_db(f_hz, pair, cable);
    Ok(cable.delay_phasor(f_hz) * db_to_amplitude(-loss).min(1.0))
}

/// Far-end crosstalk from pair `i` into pair `j`.
///
/// 20 dB/decade in frequency, 10 dB/decade in length, attenuated by the
/// insertion loss of the victim path. With heterogeneous pairs the loss term
/// is the mean (in dB) of both pairs so that `|fext(i, j)| = |fext(j, i)|`.
/// The constant phase offset is drawn from `(fext_seed, min(i,j), max(i,j))`.
pub fn fext_gain(f_hz: f64, pair_i: usize, pair_j: usize, cable: &CableSpec) -> Result<Complex64> {
    check_freq(f_hz)?;
    if pair_i == pair_j {
        return Err(Error::Domain(format!(
            "FEXT needs two distinct pairs, got {pair_i} twice"
        )));
    }
    if pair_i >= cable.num_pairs || pair_j >= cable.num_pairs {
        return Err(Error::Domain(format!(
            "pair index out of range for {} pairs",
            cable.num_pairs
        )));
    }
    if f_hz == 0.0 || cable.length_m == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let il = 0.5
        * (pair_insertion_loss_db(f_hz, pair_i, cable) + pair_insertion_loss_db(f_hz, pair_j, cable));
    let mag_db = cable.fext_ref_db
        + 20.0 * (f_hz / cable.fext_ref_hz).log10()
        + 10.0 * (cable.length_m / 100.0).log10()
        - il;
    let (a, b) = (pair_i.min(pair_j) as u64, pair_i.max(pair_j) as u64);
    let key = seeds::derive(cable.fext_seed, "fext", (a << 32) | b);
    let phase0 = 2.0 * PI * seeds::unit_from(key);
    let mag = db_to_amplitude(mag_db).min(1.0);
    Ok(Complex64::from_polar(mag, phase0) * cable.delay_phasor(f_hz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::amplitude_to_db;

    fn cat5e(len: f64) -> CableSpec {
        CableSpec::new(CableCategory::Cat5e, len, 4)
    }

    #[test]
    fn zero_length_is_unity() {
        let c = cat5e(0.0);
        for f in [0.0, 1.0e3, 1.0e6, 140.0e6, 3.0e9] {
            let g = pair_insertion_gain(f, &c).unwrap();
            assert_eq!(g, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn cat5e_100m_at_100mhz_matches_hand_evaluation() {
        // 1.967*10 + 0.023*100 + 0.050/10 = 21.975 dB
        let g = pair_insertion_gain(100.0e6, &cat5e(100.0)).unwrap();
        assert!((amplitude_to_db(g.norm()) + 21.975).abs() < 1e-9);
    }

    #[test]
    fn phase_is_linear_delay() {
        let c = cat5e(50.0);
        let f = 140.0e6;
        let g = pair_insertion_gain(f, &c).unwrap();
        let expected = -2.0 * PI * f * 50.0 / (0.69 * SPEED_OF_LIGHT);
        let d = (g.arg() - expected).rem_euclid(2.0 * PI);
        assert!(d < 1e-9 || 2.0 * PI - d < 1e-9);
    }

    #[test]
    fn dc_is_unity_magnitude() {
        let g = pair_insertion_gain(0.0, &cat5e(50.0)).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_frequency_is_domain_error() {
        assert!(matches!(
            pair_insertion_gain(-1.0, &cat5e(10.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fext_reference_point_identity() {
        let mut c = cat5e(100.0);
        c.atten = AttenCoeffs::ZERO;
        let g = fext_gain(c.fext_ref_hz, 0, 1, &c).unwrap();
        assert!((amplitude_to_db(g.norm()) - c.fext_ref_db).abs() < 1e-9);
    }

    #[test]
    fn fext_doubling_frequency_adds_6db() {
        let mut c = cat5e(100.0);
        c.atten = AttenCoeffs::ZERO;
        let g1 = fext_gain(c.fext_ref_hz, 0, 1, &c).unwrap().norm();
        let g2 = fext_gain(2.0 * c.fext_ref_hz, 0, 1, &c).unwrap().norm();
        let expected = 20.0 * 2f64.log10();
        assert!((amplitude_to_db(g2 / g1) - expected).abs() < 1e-9);
        assert!((expected - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn fext_symmetric_and_rejects_same_pair() {
        let mut c = cat5e(50.0);
        c.pair_atten_scale = vec![1.0, 1.3, 1.6, 2.0];
        for f in [10.0e6, 75.0e6, 175.0e6, 400.0e6] {
            for i in 0..4 {
                for j in 0..4 {
                    if i == j {
                        assert!(fext_gain(f, i, j, &c).is_err());
                        continue;
                    }
                    let a = fext_gain(f, i, j, &c).unwrap();
                    let b = fext_gain(f, j, i, &c).unwrap();
                    assert!((a.norm() - b.norm()).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn fext_includes_insertion_loss() {
        let mut c = cat5e(100.0);
        let f = c.fext_ref_hz;
        let with = fext_gain(f, 0, 1, &c).unwrap().norm();
        c.atten = AttenCoeffs::ZERO;
        let without = fext_gain(f, 0, 1, &c).unwrap().norm();
        assert!((amplitude_to_db(without / with) - 21.975).abs() < 1e-9);
    }

    #[test]
    fn validation_catches_bad_specs() {
        let mut c = cat5e(-1.0);
        assert!(c.validate().is_err());
        c.length_m = 10.0;
        c.velocity_factor = 1.5;
        assert!(c.validate().is_err());
        c.velocity_factor = 0.7;
        c.pair_atten_scale = vec![1.0];
        assert!(c.validate().is_err());
        c.pair_atten_scale.clear();
        assert!(c.validate().is_ok());
    }
}
