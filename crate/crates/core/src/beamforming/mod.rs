//! Uplink receive beamforming at the BBU through the effective fronthaul
//! channel: a uniform linear array sees one desired UE and a set of
//! interferers, the array outputs traverse `A`/`B`, and MVDR weights are
//! applied to the cable-side signals.

mod mvdr;
mod scenario;

pub use mvdr::{matched_filter_weights, mvdr_weights, MVDR_CONSTRAINT_TOL};
pub use scenario::{write_sinr_csv, BeamScenario, SinrCurve, ThetaSweep, SINR_CSV_HEADER};

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel_models::{CableSpec, FrontEndSpec};
use crate::link_algebra::{ChannelSnapshot, EffectiveChannel, LinkModel, LinkOptions, SignalSpec};
use crate::sf2sf::Sf2sfMapping;
use crate::units::{dbm_to_mw, power_to_db, psd_to_mw};
use crate::{Error, Result};

/// ULA steering vector, element `k = exp(j·2π·spacing·k·sin θ)`.
pub fn ula_steering(theta_deg: f64, n: usize, spacing: f64) -> Result<DVector<Complex64>> {
    if !(theta_deg.abs() <= 90.0) {
        return Err(Error::Domain(format!("|theta| must be <= 90 deg, got {theta_deg}")));
    }
    let phi = 2.0 * PI * spacing * theta_deg.to_radians().sin();
    Ok(DVector::from_fn(n, |k, _| Complex64::from_polar(1.0, phi * k as f64)))
}

/// Linear-scale powers of the scenario over the signal bandwidth, in mW.
#[derive(Clone, Debug)]
pub(crate) struct Powers {
    pub desired: f64,
    pub interferers: Vec<(f64, f64)>,
    pub antenna_noise: f64,
    pub cable_noise: f64,
}

impl Powers {
    pub fn of(s: &BeamScenario) -> Self {
        Self {
            desired: dbm_to_mw(s.desired_power_dbm),
            interferers: s
                .interferer_thetas_deg
                .iter()
                .zip(&s.interferer_powers_dbm)
                .map(|(&t, &p)| (t, dbm_to_mw(p)))
                .collect(),
            antenna_noise: psd_to_mw(s.noise.antenna_noise_dbm_hz, s.signal_bandwidth_hz),
            cable_noise: psd_to_mw(s.noise.cable_noise_dbm_hz, s.signal_bandwidth_hz),
        }
    }
}

fn rank_one(v: &DVector<Complex64>) -> DMatrix<Complex64> {
    v * v.adjoint()
}

/// Interference-plus-noise covariance (everything except the desired UE).
pub(crate) fn interference_covariance(
    s: &BeamScenario,
    p: &Powers,
    ch: &ChannelSnapshot,
) -> Result<DMatrix<Complex64>> {
    let mut q = ch.noise_covariance(p.antenna_noise, p.cable_noise);
    for &(theta, pw) in &p.interferers {
        let v = &ch.a * ula_steering(theta, s.n_antennas, s.element_spacing_wavelengths)?;
        q += rank_one(&v) * Complex64::from(pw);
    }
    Ok(q)
}

fn check_dims(s: &BeamScenario, ch: &ChannelSnapshot) -> Result<()> {
    let (a, b) = (&ch.a, &ch.b);
    if a.nrows() != s.n_antennas
        || a.ncols() != s.n_antennas
        || b.nrows() != s.n_antennas
        || ch.coherence.read_if_hz.len() != s.n_antennas
    {
        return Err(Error::Domain(format!(
            "channel is {}x{} / {}x{}, scenario has {} antennas",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            s.n_antennas
        )));
    }
    Ok(())
}

/// `R = Σ p_k (A a_k)(A a_k)ᴴ + σ_ant²·(A Aᴴ ∘ M_a) + σ_c²·(B Bᴴ ∘ M_c)` with
/// the desired UE at `desired_theta_deg`.
///
/// The masks keep only noise correlations between outputs that read the
/// same IF frequency (see [`crate::link_algebra::NoiseCoherence`]); with a
/// single IF per signal set they are all ones.
pub fn covariance_for(s: &BeamScenario, ch: &ChannelSnapshot, desired_theta_deg: f64) -> Result<DMatrix<Complex64>> {
    check_dims(s, ch)?;
    let p = Powers::of(s);
    let v = &ch.a * ula_steering(desired_theta_deg, s.n_antennas, s.element_spacing_wavelengths)?;
    let r = interference_covariance(s, &p, ch)? + rank_one(&v) * Complex64::from(p.desired);
    check_hermitian(&r)?;
    Ok(r)
}

pub(crate) fn check_hermitian(r: &DMatrix<Complex64>) -> Result<()> {
    let scale = r.norm().max(f64::MIN_POSITIVE);
    let asym = (r - r.adjoint()).norm();
    if asym > 1e-12 * scale {
        return Err(Error::Numerical(format!(
            "covariance not Hermitian: relative asymmetry {:.3e}",
            asym / scale
        )));
    }
    Ok(())
}

/// Received covariance at offset `delta` of a built effective channel.
pub fn received_covariance(s: &BeamScenario, effch: &EffectiveChannel, delta: f64) -> Result<DMatrix<Complex64>> {
    covariance_for(s, &effch.snapshot(delta)?, s.desired_theta_deg)
}

/// Output SINR in dB of weights `w`, desired UE at `desired_theta_deg`:
/// `p₀|wᴴAa₀|² / (Σ_k p_k|wᴴAa_k|² + wᴴ Q_noise w)`.
///
/// A zero denominator yields `+∞`.
pub fn sinr_for(w: &DVector<Complex64>, s: &BeamScenario, ch: &ChannelSnapshot, desired_theta_deg: f64) -> Result<f64> {
    check_dims(s, ch)?;
    if w.len() != s.n_antennas || w.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Domain("weights must be finite and match the array".into()));
    }
    let p = Powers::of(s);
    let wa = w.adjoint() * &ch.a;
    let gain = |theta: f64| -> Result<f64> {
        let st = ula_steering(theta, s.n_antennas, s.element_spacing_wavelengths)?;
        Ok((&wa * st)[(0, 0)].norm_sqr())
    };
    let signal = p.desired * gain(desired_theta_deg)?;
    let q = ch.noise_covariance(p.antenna_noise, p.cable_noise);
    let mut denom = w.dotc(&(&q * w)).re.max(0.0);
    for &(theta, pw) in &p.interferers {
        denom += pw * gain(theta)?;
    }
    if denom == 0.0 {
        log::warn!("SINR denominator is zero; reporting +inf");
        return Ok(f64::INFINITY);
    }
    Ok(power_to_db(signal / denom))
}

/// [`sinr_for`] at the scenario's desired angle and offset `delta`.
pub fn sinr_db(w: &DVector<Complex64>, s: &BeamScenario, effch: &EffectiveChannel, delta: f64) -> Result<f64> {
    sinr_for(w, s, &effch.snapshot(delta)?, s.desired_theta_deg)
}

/// MVDR SINR versus desired angle for one channel snapshot.
pub fn sweep_with_channel(s: &BeamScenario, ch: &ChannelSnapshot, mapping_id: impl Into<String>) -> Result<SinrCurve> {
    check_dims(s, ch)?;
    let thetas = s.sweep.thetas()?;
    let p = Powers::of(s);
    let q = interference_covariance(s, &p, ch)?;
    let point = |theta: f64| -> Result<f64> {
        let v = &ch.a * ula_steering(theta, s.n_antennas, s.element_spacing_wavelengths)?;
        let r = &q + rank_one(&v) * Complex64::from(p.desired);
        check_hermitian(&r)?;
        let w = mvdr_weights(&r, &v)?;
        sinr_for(&w, s, ch, theta)
    };
    let sinr = thetas.iter().map(|&t| point(t)).collect::<Result<Vec<_>>>()?;
    Ok(SinrCurve {
        theta_deg: thetas,
        sinr_db: sinr,
        mapping_id: mapping_id.into(),
    })
}

/// Places the desired UE at every angle of the sweep (interferers fixed) and
/// returns the MVDR SINR curve of one mapping.
pub fn sweep_theta(
    s: &BeamScenario,
    signals: &[SignalSpec],
    cable: &CableSpec,
    fe: &FrontEndSpec,
    mapping: &Sf2sfMapping,
    opts: LinkOptions,
) -> Result<SinrCurve> {
    s.validate()?;
    let model = LinkModel::new(signals, mapping, cable, fe, opts)?;
    sweep_with_channel(s, &model.snapshot(s.delta_hz)?, "mapping")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::NoiseModel;

    #[test]
    fn broadside_is_all_ones() {
        let a = ula_steering(0.0, 8, 0.5).unwrap();
        assert!(a.iter().all(|x| (x - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn thirty_degrees_half_wavelength_is_quarter_turn() {
        let a = ula_steering(30.0, 8, 0.5).unwrap();
        for k in 1..8 {
            let step = (a[k] * a[k - 1].conj()).arg();
            assert!((step - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mirror_is_conjugate() {
        for t in [-80.0, -13.0, 7.5, 45.0] {
            let a = ula_steering(t, 6, 0.5).unwrap();
            let b = ula_steering(-t, 6, 0.5).unwrap();
            assert!((a.map(|x| x.conj()) - b).norm() < 1e-12);
        }
        assert!(ula_steering(91.0, 4, 0.5).is_err());
    }

    fn textbook(n: usize) -> BeamScenario {
        BeamScenario {
            n_antennas: n,
            interferer_thetas_deg: vec![],
            interferer_powers_dbm: vec![],
            desired_power_dbm: -60.0,
            noise: NoiseModel { cable_noise_dbm_hz: -400.0, antenna_noise_dbm_hz: -170.0 },
            ..BeamScenario::default()
        }
    }

    #[test]
    fn rank_one_plus_white_noise() {
        let s = textbook(4);
        let ch = ChannelSnapshot::coherent(DMatrix::identity(4, 4), DMatrix::zeros(4, 4));
        let r = covariance_for(&s, &ch, 20.0).unwrap();
        let st = ula_steering(20.0, 4, 0.5).unwrap();
        let p = Powers::of(&s);
        let expected = &st * st.adjoint() * Complex64::from(p.desired)
            + DMatrix::<Complex64>::identity(4, 4) * Complex64::from(p.antenna_noise);
        assert!((r - expected).norm() < 1e-12 * p.desired);
    }

    #[test]
    fn array_gain_of_matched_filter() {
        let n = 8;
        let s = textbook(n);
        let ch = ChannelSnapshot::coherent(DMatrix::identity(n, n), DMatrix::zeros(n, n));
        let st = ula_steering(s.desired_theta_deg, n, 0.5).unwrap();
        let w = matched_filter_weights(&st).unwrap();
        let got = sinr_for(&w, &s, &ch, s.desired_theta_deg).unwrap();
        let p = Powers::of(&s);
        let expected = power_to_db(n as f64 * p.desired / p.antenna_noise);
        assert!((got - expected).abs() < 1e-9);
    }

    #[test]
    fn zero_denominator_is_infinite() {
        let mut s = textbook(2);
        s.noise.antenna_noise_dbm_hz = f64::NEG_INFINITY;
        s.noise.cable_noise_dbm_hz = f64::NEG_INFINITY;
        let ch = ChannelSnapshot::coherent(DMatrix::identity(2, 2), DMatrix::zeros(2, 2));
        let w = DVector::from_element(2, Complex64::new(0.5, 0.0));
        assert_eq!(sinr_for(&w, &s, &ch, 0.0).unwrap(), f64::INFINITY);
    }
}
