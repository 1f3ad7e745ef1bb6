use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{if_of, SignalSpec, MIXER_CONVERSION_GAIN};
use crate::channel_models::{fext_gain, frontend_gain, pair_gain, CableSpec, FrontEndSpec, NoiseModel};
use crate::sf2sf::{validate_mapping, Sf2sfMapping};
use crate::units::{dbm_to_mw, mw_to_dbm};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkOptions {
    pub fext: bool,
}

impl Default for LinkOptions {
    fn default() -> Self {
        Self { fext: true }
    }
}

/// Per-signal routing derived from a validated mapping.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Route {
    pub pair: usize,
    pub if_hz: f64,
    pub half_bw: f64,
    /// The up-converter uses high-side injection: the output line is
    /// `f_up - x`, which mirrors the IF spectrum back.
    pub up_mirrors: bool,
}

impl Route {
    /// IF frequency that lands on output offset `delta`.
    pub fn if_at(&self, delta: f64) -> f64 {
        if self.up_mirrors {
            self.if_hz - delta
        } else {
            self.if_hz + delta
        }
    }

    fn orient(&self, g: Complex64) -> Complex64 {
        if self.up_mirrors {
            g.conj()
        } else {
            g
        }
    }

    fn inside(&self, x: f64) -> bool {
        (x - self.if_hz).abs() < self.half_bw
    }
}

/// Assembles `A(δ)` and `B(δ)` for one validated mapping.
#[derive(Clone, Debug)]
pub struct LinkModel {
    routes: Vec<Route>,
    cable: CableSpec,
    fe: FrontEndSpec,
    opts: LinkOptions,
}

impl LinkModel {
    pub fn new(
        signals: &[SignalSpec],
        mapping: &Sf2sfMapping,
        cable: &CableSpec,
        fe: &FrontEndSpec,
        opts: LinkOptions,
    ) -> Result<Self> {
        cable.validate()?;
        fe.validate()?;
        if mapping.space.n_pairs() != cable.num_pairs {
            return Err(Error::Domain(format!(
                "mapping uses {} pairs but the cable has {}",
                mapping.space.n_pairs(),
                cable.num_pairs
            )));
        }
        let violations = validate_mapping(signals, mapping, fe);
        if !violations.is_empty() {
            return Err(Error::InvalidMapping(violations));
        }
        let routes = signals
            .iter()
            .enumerate()
            .map(|(n, s)| {
                let pair = mapping.space.pair_of(n).expect("validated");
                let (if_hz, _) = if_of(s.rf_center_hz, mapping.lo_plan.f_down_hz[n])?;
                Ok(Route {
                    pair,
                    if_hz,
                    half_bw: s.bandwidth_hz / 2.0,
                    up_mirrors: mapping.lo_plan.f_up_hz[n] > s.rf_center_hz,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            routes,
            cable: cable.clone(),
            fe: fe.clone(),
            opts,
        })
    }

    pub fn n_signals(&self) -> usize {
        self.routes.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.cable.num_pairs
    }

    pub fn if_centers(&self) -> Vec<f64> {
        self.routes.iter().map(|r| r.if_hz).collect()
    }

    pub fn pair_of(&self, n: usize) -> usize {
        self.routes[n].pair
    }

    /// `A(δ)`: entry `(n, m)` is the complex gain from input `m` to output
    /// `n` at output offset `δ` from the band center of signal `n`.
    pub fn a_at(&self, delta: f64) -> Result<DMatrix<Complex64>> {
        let n_sig = self.routes.len();
        let g2 = MIXER_CONVERSION_GAIN * MIXER_CONVERSION_GAIN;
        let mut a = DMatrix::zeros(n_sig, n_sig);
        for (n, rn) in self.routes.iter().enumerate() {
            let x = rn.if_at(delta);
            let hb = frontend_gain(x, &self.fe)?;
            let hb2 = hb * hb * g2;
            a[(n, n)] = rn.orient(hb2 * pair_gain(x, rn.pair, &self.cable)?);
            if !self.opts.fext {
                continue;
            }
            for (m, rm) in self.routes.iter().enumerate() {
                if m == n || rm.pair == rn.pair || !rm.inside(x) {
                    continue;
                }
                a[(n, m)] = rn.orient(hb2 * fext_gain(x, rm.pair, rn.pair, &self.cable)?);
            }
        }
        Ok(a)
    }

    /// `B(δ)`: pair noise injected at the far end, through the far-end
    /// front-end and the up-converter. Direct pair weight 1, FEXT otherwise.
    pub fn b_at(&self, delta: f64) -> Result<DMatrix<Complex64>> {
        let l_pairs = self.cable.num_pairs;
        let mut b = DMatrix::zeros(self.routes.len(), l_pairs);
        for (n, rn) in self.routes.iter().enumerate() {
            let x = rn.if_at(delta);
            let hb = frontend_gain(x, &self.fe)? * MIXER_CONVERSION_GAIN;
            for l in 0..l_pairs {
                let c = if l == rn.pair {
                    Complex64::new(1.0, 0.0)
                } else if self.opts.fext {
                    fext_gain(x, l, rn.pair, &self.cable)?
                } else {
                    continue;
                };
                b[(n, l)] = rn.orient(hb * c);
            }
        }
        Ok(b)
    }

    /// Which IF frequency each output reads at offset `delta`.
    pub fn coherence_at(&self, delta: f64) -> NoiseCoherence {
        NoiseCoherence {
            read_if_hz: self.routes.iter().map(|r| r.if_at(delta)).collect(),
            mirrored: self.routes.iter().map(|r| r.up_mirrors).collect(),
        }
    }

    pub fn snapshot(&self, delta: f64) -> Result<ChannelSnapshot> {
        Ok(ChannelSnapshot {
            a: self.a_at(delta)?,
            b: self.b_at(delta)?,
            coherence: self.coherence_at(delta),
        })
    }

    pub fn build(&self, grid: &[f64]) -> Result<EffectiveChannel> {
        let mut a_of_f = Vec::with_capacity(grid.len());
        let mut b_of_f = Vec::with_capacity(grid.len());
        let mut coherence = Vec::with_capacity(grid.len());
        for &d in grid {
            a_of_f.push(self.a_at(d)?);
            b_of_f.push(self.b_at(d)?);
            coherence.push(self.coherence_at(d));
        }
        Ok(EffectiveChannel {
            freq_grid_hz: grid.to_vec(),
            a_of_f,
            b_of_f,
            coherence,
            if_centers_hz: self.if_centers(),
        })
    }
}

/// `points` offsets evenly spanning `[-bw/2, +bw/2]`.
pub fn default_grid(bandwidth_hz: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|k| -bandwidth_hz / 2.0 + bandwidth_hz * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Frequency-sampled `A` and `B`; immutable once built.
#[derive(Clone, Debug)]
pub struct EffectiveChannel {
    pub freq_grid_hz: Vec<f64>,
    pub a_of_f: Vec<DMatrix<Complex64>>,
    pub b_of_f: Vec<DMatrix<Complex64>>,
    pub coherence: Vec<NoiseCoherence>,
    pub if_centers_hz: Vec<f64>,
}

impl EffectiveChannel {
    pub fn n_signals(&self) -> usize {
        self.if_centers_hz.len()
    }

    pub fn index_of(&self, delta: f64) -> Option<usize> {
        self.freq_grid_hz
            .iter()
            .position(|&d| (d - delta).abs() <= 1e-6 * (1.0 + d.abs()))
    }

    fn grid_index(&self, delta: f64) -> Result<usize> {
        self.index_of(delta)
            .ok_or_else(|| Error::Domain(format!("offset {delta} Hz is not on the grid")))
    }

    pub fn a(&self, delta: f64) -> Result<&DMatrix<Complex64>> {
        Ok(&self.a_of_f[self.grid_index(delta)?])
    }

    pub fn b(&self, delta: f64) -> Result<&DMatrix<Complex64>> {
        Ok(&self.b_of_f[self.grid_index(delta)?])
    }

    pub fn snapshot(&self, delta: f64) -> Result<ChannelSnapshot> {
        let i = self.grid_index(delta)?;
        Ok(ChannelSnapshot {
            a: self.a_of_f[i].clone(),
            b: self.b_of_f[i].clone(),
            coherence: self.coherence[i].clone(),
        })
    }

    /// CSV with header `delta_hz,n,m,re,im`, one row per `A` entry.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "delta_hz,n,m,re,im")?;
        for (d, a) in self.freq_grid_hz.iter().zip(&self.a_of_f) {
            for n in 0..a.nrows() {
                for m in 0..a.ncols() {
                    let v = a[(n, m)];
                    writeln!(w, "{d},{n},{m},{},{}", v.re, v.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Frequency bookkeeping for noise correlation between outputs.
///
/// Noise sources are white processes, so two outputs share a noise
/// component only when they read it at the same frequency. Output `n` reads
/// the cable, and through it every antenna, at IF `read_if_hz[n]`; a
/// mirrored output additionally sees the conjugate spectrum, which is
/// uncorrelated with the direct one for circular noise.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseCoherence {
    pub read_if_hz: Vec<f64>,
    pub mirrored: Vec<bool>,
}

impl NoiseCoherence {
    const SAME_FREQ_TOL_HZ: f64 = 1e-3;

    /// Every output reads the same frequency with the same orientation.
    pub fn all_coherent(n: usize) -> Self {
        Self { read_if_hz: vec![0.0; n], mirrored: vec![false; n] }
    }

    fn mask(&self, with_orientation: bool) -> DMatrix<f64> {
        let n = self.read_if_hz.len();
        DMatrix::from_fn(n, n, |i, j| {
            let same_f = (self.read_if_hz[i] - self.read_if_hz[j]).abs() <= Self::SAME_FREQ_TOL_HZ;
            let same_o = !with_orientation || self.mirrored[i] == self.mirrored[j];
            if same_f && same_o { 1.0 } else { 0.0 }
        })
    }

    /// Mask applied to `A Aᴴ` for antenna noise.
    pub fn antenna_mask(&self) -> DMatrix<f64> {
        self.mask(false)
    }

    /// Mask applied to `B Bᴴ` for cable noise.
    pub fn cable_mask(&self) -> DMatrix<f64> {
        self.mask(true)
    }
}

/// `A`, `B` and noise coherence at one offset.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSnapshot {
    pub a: DMatrix<Complex64>,
    pub b: DMatrix<Complex64>,
    pub coherence: NoiseCoherence,
}

impl ChannelSnapshot {
    /// Snapshot whose noise is fully coherent across outputs.
    pub fn coherent(a: DMatrix<Complex64>, b: DMatrix<Complex64>) -> Self {
        let n = a.nrows();
        Self { a, b, coherence: NoiseCoherence::all_coherent(n) }
    }

    /// `σ_ant²·(A Aᴴ ∘ M_a) + σ_c²·(B Bᴴ ∘ M_c)`, in the units of the
    /// variances.
    pub fn noise_covariance(&self, antenna_var: f64, cable_var: f64) -> DMatrix<Complex64> {
        let ma = self.coherence.antenna_mask();
        let mc = self.coherence.cable_mask();
        let aa = &self.a * self.a.adjoint();
        let bb = &self.b * self.b.adjoint();
        DMatrix::from_fn(aa.nrows(), aa.ncols(), |i, j| {
            aa[(i, j)] * (antenna_var * ma[(i, j)]) + bb[(i, j)] * (cable_var * mc[(i, j)])
        })
    }
}

/// Output noise PSD (dBm/Hz) at port `n`:
/// `Σ_l |B_nl|²·N_cable + Σ_m |A_nm|²·N_antenna`.
pub fn output_noise_psd(
    effch: &EffectiveChannel,
    noise: &NoiseModel,
    n: usize,
    delta: f64,
) -> Result<f64> {
    let a = effch.a(delta)?;
    let b = effch.b(delta)?;
    if n >= a.nrows() {
        return Err(Error::Domain(format!("port {n} out of range")));
    }
    let cable: f64 = b.row(n).iter().map(|v| v.norm_sqr()).sum();
    let ant: f64 = a.row(n).iter().map(|v| v.norm_sqr()).sum();
    let mw = cable * dbm_to_mw(noise.cable_noise_dbm_hz) + ant * dbm_to_mw(noise.antenna_noise_dbm_hz);
    Ok(mw_to_dbm(mw))
}
