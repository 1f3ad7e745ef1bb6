//! Simplified standard-like OFDM frames.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::link_algebra::Rat;
use crate::seeds;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> u32 {
        match self {
            Self::Qpsk => 2,
            Self::Qam16 => 4,
            Self::Qam64 => 6,
        }
    }

    /// Square constellation with unit average energy.
    pub fn constellation(self) -> Vec<Complex64> {
        let m = 1usize << (self.bits_per_symbol() / 2);
        let levels: Vec<f64> = (0..m).map(|i| (2 * i) as f64 - (m - 1) as f64).collect();
        let e = 2.0 * levels.iter().map(|l| l * l).sum::<f64>() / m as f64;
        let s = 1.0 / e.sqrt();
        levels
            .iter()
            .flat_map(|&i| levels.iter().map(move |&q| Complex64::new(i * s, q * s)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeRate {
    pub num: u32,
    pub den: u32,
}

impl CodeRate {
    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Waveform definition. `sample_rate_hz / fft_size` is the subcarrier spacing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformSpec {
    pub rat: Rat,
    pub bandwidth_hz: f64,
    pub sample_rate_hz: f64,
    pub modulation: Modulation,
    pub code_rate: CodeRate,
    pub n_symbols: usize,
    pub fft_size: usize,
    pub occupied: usize,
    pub cp_fraction: f64,
    /// Every `pilot_spacing`-th occupied carrier is a pilot; 1 makes an
    /// all-pilot frame.
    pub pilot_spacing: usize,
    /// Silent symbols appended after the burst.
    pub idle_symbols: usize,
    pub seed: u64,
}

impl WaveformSpec {
    /// 16-QAM 3/4 WiMAX-like frame, 7 MHz channel.
    pub fn wimax() -> Self {
        Self {
            rat: Rat::Wimax,
            bandwidth_hz: 7e6,
            sample_rate_hz: 16e6,
            modulation: Modulation::Qam16,
            code_rate: CodeRate { num: 3, den: 4 },
            n_symbols: 16,
            fft_size: 512,
            occupied: 200,
            cp_fraction: 0.25,
            pilot_spacing: 8,
            idle_symbols: 0,
            seed: 1,
        }
    }

    /// LTE-like 5 MHz downlink frame.
    pub fn lte() -> Self {
        Self {
            rat: Rat::Lte,
            bandwidth_hz: 5e6,
            sample_rate_hz: 15.36e6,
            modulation: Modulation::Qam16,
            code_rate: CodeRate { num: 1, den: 2 },
            n_symbols: 14,
            fft_size: 1024,
            occupied: 300,
            cp_fraction: 0.0703125,
            pilot_spacing: 6,
            idle_symbols: 0,
            seed: 1,
        }
    }

    /// 802.11n-like 20 MHz frame.
    pub fn wifi() -> Self {
        Self {
            rat: Rat::Wifi,
            bandwidth_hz: 20e6,
            sample_rate_hz: 40e6,
            modulation: Modulation::Qam64,
            code_rate: CodeRate { num: 5, den: 6 },
            n_symbols: 64,
            fft_size: 128,
            occupied: 52,
            cp_fraction: 0.25,
            pilot_spacing: 13,
            idle_symbols: 0,
            seed: 1,
        }
    }

    pub fn for_rat(rat: Rat) -> Self {
        match rat {
            Rat::Lte => Self::lte(),
            Rat::Wifi => Self::wifi(),
            Rat::Wimax | Rat::Generic => Self::wimax(),
        }
    }

    pub fn cp_len(&self) -> usize {
        (self.cp_fraction * self.fft_size as f64).round() as usize
    }

    pub fn symbol_len(&self) -> usize {
        self.fft_size + self.cp_len()
    }

    pub fn occupied_bandwidth_hz(&self) -> f64 {
        self.occupied as f64 * self.sample_rate_hz / self.fft_size as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(format!("waveform: {m}")));
        if self.occupied == 0 || self.occupied >= self.fft_size {
            return bad("need 0 < occupied carriers < FFT size");
        }
        if !(0.0..=0.5).contains(&self.cp_fraction) {
            return bad("CP fraction must lie in [0, 1/2]");
        }
        if self.n_symbols == 0 || self.pilot_spacing == 0 {
            return bad("need at least one symbol and a positive pilot spacing");
        }
        if !(self.sample_rate_hz > 0.0) || !(self.bandwidth_hz > 0.0) {
            return bad("rates must be positive");
        }
        if self.code_rate.den == 0 || self.code_rate.num == 0 || self.code_rate.num > self.code_rate.den {
            return bad("code rate must lie in (0, 1]");
        }
        Ok(())
    }
}

/// Generated frame plus everything a receiver needs to measure it.
#[derive(Clone, Debug)]
pub struct Waveform {
    pub spec: WaveformSpec,
    /// Unit average power over the burst (on-portion).
    pub samples: Vec<Complex64>,
    /// Number of leading samples that carry the burst.
    pub on_len: usize,
    /// FFT bin of each occupied carrier, DC excluded.
    pub carrier_bins: Vec<usize>,
    pub is_pilot: Vec<bool>,
    /// Transmitted value on each occupied carrier, per symbol, on the same
    /// scale the receiver's FFT sees for a unit-gain channel.
    pub grid: Vec<Vec<Complex64>>,
}

impl Waveform {
    pub fn sample_rate_hz(&self) -> f64 {
        self.spec.sample_rate_hz
    }
}

pub(crate) fn carrier_bins(fft_size: usize, occupied: usize) -> Vec<usize> {
    let lower = occupied / 2;
    let upper = occupied - lower;
    (1..=lower)
        .rev()
        .map(|k| fft_size - k)
        .chain(1..=upper)
        .collect()
}

/// Builds a seeded OFDM frame with known pilots, normalised to unit average
/// power over the burst.
pub fn gen_waveform(spec: &WaveformSpec) -> Result<Waveform> {
    spec.validate()?;
    let n = spec.fft_size;
    let cp = spec.cp_len();
    let bins = carrier_bins(n, spec.occupied);
    let is_pilot: Vec<bool> = (0..spec.occupied).map(|k| k % spec.pilot_spacing == 0).collect();
    let points = spec.modulation.constellation();
    let mut rng = seeds::rng(spec.seed, "payload", 0);
    let pilot_base = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);

    let mut grid: Vec<Vec<Complex64>> = (0..spec.n_symbols)
        .map(|_| {
            is_pilot
                .iter()
                .map(|&p| {
                    if p {
                        if rng.random::<bool>() { pilot_base } else { -pilot_base }
                    } else {
                        points[rng.random_range(0..points.len())]
                    }
                })
                .collect()
        })
        .collect();

    let ifft = FftPlanner::new().plan_fft_inverse(n);
    let mut samples = Vec::with_capacity((spec.n_symbols + spec.idle_symbols) * (n + cp));
    let mut buf = vec![Complex64::default(); n];
    for sym in &grid {
        buf.iter_mut().for_each(|b| *b = Complex64::default());
        for (&k, &v) in bins.iter().zip(sym) {
            buf[k] = v;
        }
        ifft.process(&mut buf);
        samples.extend_from_slice(&buf[n - cp..]);
        samples.extend_from_slice(&buf);
    }
    let on_len = samples.len();
    let power = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / on_len as f64;
    let scale = 1.0 / power.sqrt();
    samples.iter_mut().for_each(|s| *s *= scale);
    // The forward FFT of an unnormalised inverse FFT returns n·X.
    let grid_scale = scale * n as f64;
    grid.iter_mut().flatten().for_each(|v| *v *= grid_scale);
    samples.resize(on_len + spec.idle_symbols * (n + cp), Complex64::default());

    Ok(Waveform {
        spec: spec.clone(),
        samples,
        on_len,
        carrier_bins: bins,
        is_pilot,
        grid,
    })
}

/// FFT of every burst symbol (CP removed), restricted to occupied carriers.
pub(crate) fn demodulate(wf: &Waveform, rx: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = wf.spec.fft_size;
    let cp = wf.spec.cp_len();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut buf = vec![Complex64::default(); n];
    (0..wf.spec.n_symbols)
        .map(|s| {
            let start = s * (n + cp) + cp;
            buf.copy_from_slice(&rx[start..start + n]);
            fft.process(&mut buf);
            wf.carrier_bins.iter().map(|&k| buf[k]).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constellations_have_unit_energy() {
        for m in [Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64] {
            let c = m.constellation();
            assert_eq!(c.len(), 1 << m.bits_per_symbol());
            let e = c.iter().map(|x| x.norm_sqr()).sum::<f64>() / c.len() as f64;
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn carrier_layout() {
        let b = carrier_bins(16, 6);
        assert_eq!(b, vec![13, 14, 15, 1, 2, 3]);
        assert!(!b.contains(&0));
    }

    #[test]
    fn unit_power_and_length() {
        let wf = gen_waveform(&WaveformSpec::wimax()).unwrap();
        assert_eq!(wf.samples.len(), 16 * 640);
        let p = wf.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / wf.samples.len() as f64;
        assert!((p - 1.0).abs() < 1e-3);
    }

    #[test]
    fn loopback_reconstructs_grid() {
        for spec in [WaveformSpec::wimax(), WaveformSpec::lte(), WaveformSpec::wifi()] {
            let wf = gen_waveform(&spec).unwrap();
            let rx = demodulate(&wf, &wf.samples);
            for (a, b) in rx.iter().flatten().zip(wf.grid.iter().flatten()) {
                assert!((a - b).norm() < 1e-9 * b.norm().max(1.0));
            }
        }
    }

    #[test]
    fn idle_tail_is_silent() {
        let spec = WaveformSpec { idle_symbols: 4, ..WaveformSpec::wimax() };
        let wf = gen_waveform(&spec).unwrap();
        assert_eq!(wf.samples.len(), 20 * 640);
        assert!(wf.samples[wf.on_len..].iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn same_seed_same_frame() {
        let a = gen_waveform(&WaveformSpec::wimax()).unwrap();
        let b = gen_waveform(&WaveformSpec::wimax()).unwrap();
        let c = gen_waveform(&WaveformSpec { seed: 2, ..WaveformSpec::wimax() }).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn invalid_specs() {
        let base = WaveformSpec::wimax();
        assert!(WaveformSpec { occupied: 512, ..base.clone() }.validate().is_err());
        assert!(WaveformSpec { cp_fraction: 0.6, ..base.clone() }.validate().is_err());
        assert!(WaveformSpec { pilot_spacing: 0, ..base }.validate().is_err());
    }
}
