use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::chain::{apply_chain, ImpairmentChain};
use super::ofdm::{demodulate, Waveform};
use crate::seeds;
use crate::units::{mw_to_dbm, power_to_db};
use crate::{Error, Result};

/// Reported in place of `-inf` for an error-free link.
pub const EVM_FLOOR_DB: f64 = -100.0;
/// Upper clamp on reported CINR.
pub const CINR_CAP_DB: f64 = 100.0;

const CFO_ZERO_PAD: usize = 8;

/// Resolution of the zero-padded CFO search for `n` samples at `fs`.
pub fn cfo_bin_hz(n: usize, fs: f64) -> f64 {
    fs / (n.next_power_of_two() * CFO_ZERO_PAD) as f64
}

fn periodogram(z: &[Complex64], f: f64, fs: f64) -> f64 {
    let w = -2.0 * PI * f / fs;
    let step = Complex64::from_polar(1.0, w);
    let mut rot = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::default();
    for (k, &v) in z.iter().enumerate() {
        if k % 1024 == 0 {
            rot = Complex64::from_polar(1.0, w * k as f64);
        }
        acc += v * rot;
        rot *= step;
    }
    acc.norm_sqr()
}

/// Carrier frequency offset of `rx` relative to the known `tx`.
///
/// Coarse search on the zero-padded FFT of `rx·conj(tx)`, then a golden
/// section refinement of the periodogram within one bin of the peak.
pub fn estimate_cfo(tx: &[Complex64], rx: &[Complex64], fs: f64) -> Result<f64> {
    if tx.len() != rx.len() || tx.is_empty() {
        return Err(Error::Domain("CFO estimation needs equal, nonempty sequences".into()));
    }
    let z: Vec<Complex64> = rx.iter().zip(tx).map(|(r, t)| r * t.conj()).collect();
    let k = z.len().next_power_of_two() * CFO_ZERO_PAD;
    let mut buf = z.clone();
    buf.resize(k, Complex64::default());
    FftPlanner::new().plan_fft_forward(k).process(&mut buf);
    let (peak, mag) = buf
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.norm_sqr()))
        .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
    if !(mag > 0.0) {
        return Err(Error::Numerical("no correlation between rx and tx".into()));
    }
    let bin = fs / k as f64;
    let signed = if peak >= k / 2 { peak as f64 - k as f64 } else { peak as f64 };
    let (mut a, mut b) = ((signed - 1.0) * bin, (signed + 1.0) * bin);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (periodogram(&z, c, fs), periodogram(&z, d, fs));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = periodogram(&z, c, fs);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = periodogram(&z, d, fs);
        }
        if b - a < 1e-6 {
            break;
        }
    }
    Ok((a + b) / 2.0)
}

/// `20·log10(max|x| / rms|x|)`.
pub fn measure_crest_factor(x: &[Complex64]) -> Result<f64> {
    let p = x.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len().max(1) as f64;
    if !(p > 0.0) {
        return Err(Error::Domain("crest factor of a silent signal".into()));
    }
    let peak = x.iter().map(|s| s.norm_sqr()).fold(0.0, f64::max);
    Ok(power_to_db(peak / p))
}

/// Equalised receive grid of a synchronised burst.
struct Equalised {
    rx: Vec<Vec<Complex64>>,
    /// Pilot-estimated channel tap.
    h: Complex64,
}

fn derotate(rx: &[Complex64], cfo: f64, fs: f64) -> Vec<Complex64> {
    let w = -2.0 * PI * cfo / fs;
    rx.iter()
        .enumerate()
        .map(|(n, &s)| s * Complex64::from_polar(1.0, w * n as f64))
        .collect()
}

fn equalise(wf: &Waveform, rx: &[Complex64], cfo: f64) -> Result<Equalised> {
    if rx.len() < wf.on_len {
        return Err(Error::Domain(format!(
            "received {} samples, burst has {}",
            rx.len(),
            wf.on_len
        )));
    }
    let fixed = derotate(&rx[..wf.on_len], cfo, wf.sample_rate_hz());
    let grid = demodulate(wf, &fixed);
    let (mut num, mut den) = (Complex64::default(), 0.0);
    for (r, t) in grid.iter().zip(&wf.grid) {
        for k in (0..r.len()).filter(|&k| wf.is_pilot[k]) {
            num += r[k] * t[k].conj();
            den += t[k].norm_sqr();
        }
    }
    if den == 0.0 {
        return Err(Error::Domain("reference has no pilot energy".into()));
    }
    Ok(Equalised { rx: grid, h: num / den })
}

fn evm_of(wf: &Waveform, eq: &Equalised) -> Result<f64> {
    let any_data = wf.is_pilot.iter().any(|p| !p);
    let (mut err, mut refp) = (0.0, 0.0);
    if eq.h.norm() == 0.0 {
        return Err(Error::Numerical("zero channel estimate".into()));
    }
    for (r, t) in eq.rx.iter().zip(&wf.grid) {
        for k in 0..r.len() {
            if any_data && wf.is_pilot[k] {
                continue;
            }
            err += (r[k] / eq.h - t[k]).norm_sqr();
            refp += t[k].norm_sqr();
        }
    }
    if refp == 0.0 {
        return Err(Error::Domain("reference has zero energy".into()));
    }
    Ok(power_to_db(err / refp).max(EVM_FLOOR_DB))
}

/// EVM in dB over data carriers (all carriers for an all-pilot frame).
///
/// The receiver corrects the carrier offset and applies one pilot-estimated
/// complex gain before comparing against the transmitted grid, as a vector
/// signal analyzer does. Error-free links report [`EVM_FLOOR_DB`].
pub fn measure_evm(wf: &Waveform, rx: &[Complex64]) -> Result<f64> {
    let cfo = estimate_cfo(&wf.samples[..wf.on_len], &rx[..wf.on_len.min(rx.len())], wf.sample_rate_hz())?;
    evm_of(wf, &equalise(wf, rx, cfo)?)
}

fn cinr_of(wf: &Waveform, eq: &Equalised) -> f64 {
    let (mut sig, mut err) = (0.0, 0.0);
    for (r, t) in eq.rx.iter().zip(&wf.grid) {
        for k in (0..r.len()).filter(|&k| wf.is_pilot[k]) {
            sig += (eq.h * t[k]).norm_sqr();
            err += (r[k] - eq.h * t[k]).norm_sqr();
        }
    }
    if err == 0.0 {
        CINR_CAP_DB
    } else {
        power_to_db(sig / err).min(CINR_CAP_DB)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerMetrics {
    /// Mean power over the whole capture.
    pub rssi_dbm: f64,
    /// Mean power over the burst.
    pub burst_power_dbm: f64,
    pub cinr_db: f64,
}

pub fn measure_power_metrics(wf: &Waveform, y: &[Complex64]) -> Result<PowerMetrics> {
    if y.is_empty() || y.len() < wf.on_len {
        return Err(Error::Domain("capture shorter than the burst".into()));
    }
    let mean = |s: &[Complex64]| s.iter().map(|v| v.norm_sqr()).sum::<f64>() / s.len() as f64;
    let cfo = estimate_cfo(&wf.samples[..wf.on_len], &y[..wf.on_len], wf.sample_rate_hz())?;
    let eq = equalise(wf, y, cfo)?;
    Ok(PowerMetrics {
        rssi_dbm: mw_to_dbm(mean(y)),
        burst_power_dbm: mw_to_dbm(mean(&y[..wf.on_len])),
        cinr_db: cinr_of(wf, &eq),
    })
}

/// `10⁶·(measured − nominal)/nominal`.
pub fn clock_error_ppm(nominal_hz: f64, measured_hz: f64) -> Result<f64> {
    if !(nominal_hz > 0.0) || !measured_hz.is_finite() {
        return Err(Error::Domain("nominal clock must be positive".into()));
    }
    Ok(1e6 * (measured_hz - nominal_hz) / nominal_hz)
}

/// Reference oscillator with a symmetric frequency tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tcxo {
    pub nominal_hz: f64,
    pub stability_ppb: f64,
}

impl Default for Tcxo {
    fn default() -> Self {
        Self {
            nominal_hz: 10e6,
            stability_ppb: 50.0,
        }
    }
}

impl Tcxo {
    /// Frequency of one unit, uniform within the tolerance.
    pub fn draw(&self, seed: u64) -> f64 {
        let u: f64 = seeds::rng(seed, "tcxo", 0).random_range(-1.0..=1.0);
        self.nominal_hz * (1.0 + u * self.stability_ppb * 1e-9)
    }
}

/// Everything a vector signal analyzer reports for one capture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkMetrics {
    pub evm_db: f64,
    pub crest_factor_db: f64,
    pub burst_power_dbm: f64,
    pub rssi_dbm: f64,
    pub cinr_db: f64,
    pub cfe_hz: f64,
    pub clock_error_ppm: f64,
}

/// Sends `wf` through `chain` at `input_power_dbm` and measures the result.
pub fn measure_link(
    wf: &Waveform,
    chain: &ImpairmentChain,
    input_power_dbm: f64,
    tcxo: &Tcxo,
) -> Result<LinkMetrics> {
    let chain = ImpairmentChain { sample_rate_hz: wf.sample_rate_hz(), ..chain.clone() };
    chain.validate(wf.spec.occupied_bandwidth_hz())?;
    let y = apply_chain(&wf.samples, &chain, input_power_dbm)?;
    let cfo = estimate_cfo(&wf.samples[..wf.on_len], &y[..wf.on_len], wf.sample_rate_hz())?;
    let eq = equalise(wf, &y, cfo)?;
    let mean = |s: &[Complex64]| s.iter().map(|v| v.norm_sqr()).sum::<f64>() / s.len() as f64;
    Ok(LinkMetrics {
        evm_db: evm_of(wf, &eq)?,
        crest_factor_db: measure_crest_factor(&y[..wf.on_len])?,
        burst_power_dbm: mw_to_dbm(mean(&y[..wf.on_len])),
        rssi_dbm: mw_to_dbm(mean(&y)),
        cinr_db: cinr_of(wf, &eq),
        cfe_hz: cfo,
        clock_error_ppm: clock_error_ppm(tcxo.nominal_hz, tcxo.draw(chain.seed))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform_lab::{gen_waveform, Modulation, WaveformSpec};

    #[test]
    fn crest_factor_closed_forms() {
        let tone: Vec<Complex64> = (0..1000).map(|k| Complex64::from_polar(1.0, 0.3 * k as f64)).collect();
        assert!(measure_crest_factor(&tone).unwrap().abs() < 1e-12);
        // Two equal tones: peak amplitude 2, rms √2.
        let n = 4096;
        let two: Vec<Complex64> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                Complex64::from_polar(1.0, 3.0 * t) + Complex64::from_polar(1.0, 7.0 * t)
            })
            .collect();
        assert!((measure_crest_factor(&two).unwrap() - 20.0 * 2f64.sqrt().log10()).abs() < 1e-9);
        assert!(measure_crest_factor(&[Complex64::default(); 4]).is_err());
    }

    #[test]
    fn papr_of_default_frame() {
        let wf = gen_waveform(&WaveformSpec::wimax()).unwrap();
        let cf = measure_crest_factor(&wf.samples).unwrap();
        assert!((6.0..=13.0).contains(&cf), "{cf}");
    }

    #[test]
    fn clipping_lowers_crest_factor() {
        let wf = gen_waveform(&WaveformSpec::wimax()).unwrap();
        let chain = ImpairmentChain { nonlin_p1db_dbm: 0.0, ..Default::default() };
        let y = apply_chain(&wf.samples, &chain, 5.0).unwrap();
        assert!(measure_crest_factor(&y).unwrap() <= measure_crest_factor(&wf.samples).unwrap());
    }

    #[test]
    fn loopback_hits_floor() {
        let spec = WaveformSpec { modulation: Modulation::Qpsk, pilot_spacing: 1, ..WaveformSpec::wimax() };
        let wf = gen_waveform(&spec).unwrap();
        assert_eq!(measure_evm(&wf, &wf.samples).unwrap(), EVM_FLOOR_DB);
        let wf = gen_waveform(&WaveformSpec::wimax()).unwrap();
        assert_eq!(measure_evm(&wf, &wf.samples).unwrap(), EVM_FLOOR_DB);
    }

    #[test]
    fn evm_tracks_snr_under_awgn() {
        let wf = gen_waveform(&WaveformSpec::wimax()).unwrap();
        let occ = wf.spec.occupied_bandwidth_hz();
        for snr in [5.0, 25.0, 35.0] {
            // Received power 0 dBm; set the PSD for the requested in-band SNR.
            let psd = -snr - 10.0 * occ.log10();
            let chain = ImpairmentChain {
                noise_psd_dbm_hz: psd,
                sample_rate_hz: wf.sample_rate_hz(),
                seed: 11,
                ..Default::default()
            };
            let m = measure_link(&wf, &chain, 0.0, &Tcxo::default()).unwrap();
            assert!((m.evm_db + snr).abs() < 0.3, "snr {snr}: evm {}", m.evm_db);
            assert!((m.cinr_db + m.evm_db).abs() < 1.0);
        }
    }

    #[test]
    fn cfo_recovered_within_a_bin() {
        let wf = gen_waveform(&WaveformSpec::wimax()).unwrap();
        let bin = cfo_bin_hz(wf.on_len, wf.sample_rate_hz());
        for detune in [-10_000.0, -4183.0, 0.0, 317.5, 4183.0, 9999.0] {
            let chain = ImpairmentChain {
                lo_detune_hz: detune,
                noise_psd_dbm_hz: -150.0,
                gain_db: -50.0,
                sample_rate_hz: wf.sample_rate_hz(),
                ..Default::default()
            };
            let m = measure_link(&wf, &chain, 0.0, &Tcxo::default()).unwrap();
            assert!((m.cfe_hz - detune).abs() <= bin, "{detune} -> {}", m.cfe_hz);
            assert!(m.evm_db < -25.0);
        }
    }

    #[test]
    fn power_metrics() {
        let spec = WaveformSpec { idle_symbols: 16, ..WaveformSpec::wimax() };
        let wf = gen_waveform(&spec).unwrap();
        let chain = ImpairmentChain { gain_db: -50.0, sample_rate_hz: wf.sample_rate_hz(), ..Default::default() };
        let y = apply_chain(&wf.samples, &chain, 0.0).unwrap();
        let p = measure_power_metrics(&wf, &y).unwrap();
        assert!((p.burst_power_dbm + 50.0).abs() < 0.1);
        assert!((p.rssi_dbm - (p.burst_power_dbm - 3.0103)).abs() < 0.01);
        assert_eq!(p.cinr_db, CINR_CAP_DB);
    }

    #[test]
    fn clock_error() {
        assert_eq!(clock_error_ppm(10e6, 10e6).unwrap(), 0.0);
        assert!((clock_error_ppm(10e6, 10e6 + 0.5).unwrap() - 0.05).abs() < 1e-12);
        assert!((clock_error_ppm(10e6, 10e6 - 0.5).unwrap() + 0.05).abs() < 1e-12);
        let t = Tcxo::default();
        for seed in 0..200 {
            let ce = clock_error_ppm(t.nominal_hz, t.draw(seed)).unwrap();
            assert!(ce.abs() <= 0.05 + 1e-12);
        }
        assert!(clock_error_ppm(0.0, 1.0).is_err());
    }
}
