//! Input-power and MCS sweeps over the passive chain.

use serde::{Deserialize, Serialize};

use super::chain::ImpairmentChain;
use super::metrics::{measure_link, LinkMetrics, Tcxo};
use super::ofdm::{gen_waveform, WaveformSpec};
use super::throughput::{McsTable, ThroughputModel};
use crate::channel_models::{fext_gain, frontend_gain, pair_gain, CableSpec, FrontEndSpec};
use crate::link_algebra::Rat;
use crate::seeds;
use crate::units::{dbm_to_mw, power_to_db};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvmSweep {
    pub waveform: WaveformSpec,
    pub chain: ImpairmentChain,
    pub tcxo: Tcxo,
    pub powers_dbm: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub input_power_dbm: f64,
    /// In-band SNR the linear chain alone would give.
    pub snr_db: f64,
    pub metrics: LinkMetrics,
}

impl EvmSweep {
    /// Derives the payload and impairment streams from one experiment seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.waveform.seed = seeds::derive(seed, "waveform", 0);
        self.chain.seed = seeds::derive(seed, "impairments", 0);
        self
    }
}

/// Inclusive power grid `start, start + step, …, ≤ stop`.
pub fn power_grid(start_dbm: f64, stop_dbm: f64, step_db: f64) -> Result<Vec<f64>> {
    if !(step_db > 0.0) || !(stop_dbm >= start_dbm) || !start_dbm.is_finite() || !stop_dbm.is_finite() {
        return Err(Error::Domain("power grid needs start <= stop and a positive step".into()));
    }
    let n = ((stop_dbm - start_dbm) / step_db + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start_dbm + i as f64 * step_db).collect())
}

/// Measures the link at every input power. One waveform and one noise
/// realization are shared by all points.
pub fn evm_sweep(sweep: &EvmSweep) -> Result<Vec<SweepPoint>> {
    let wf = gen_waveform(&sweep.waveform)?;
    let chain = ImpairmentChain { sample_rate_hz: wf.sample_rate_hz(), ..sweep.chain.clone() };
    chain.validate(wf.spec.occupied_bandwidth_hz())?;
    let noise_db = sweep.chain.noise_psd_dbm_hz + 10.0 * wf.spec.occupied_bandwidth_hz().log10();
    let point = |&p: &f64| -> Result<SweepPoint> {
        Ok(SweepPoint {
            input_power_dbm: p,
            snr_db: p + chain.gain_db - noise_db,
            metrics: measure_link(&wf, &chain, p, &sweep.tcxo)?,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        sweep.powers_dbm.par_iter().map(point).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep.powers_dbm.iter().map(point).collect()
    }
}

pub const EVM_CSV_HEADER: &str = "sweep_var,value,evm_db,cf_db,rssi_dbm,bp_dbm,cinr_db,cfe_hz,ce_ppm";

pub fn write_evm_csv<W: std::io::Write>(points: &[SweepPoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{EVM_CSV_HEADER}")?;
    for p in points {
        let m = &p.metrics;
        writeln!(
            w,
            "input_power_dbm,{},{},{},{},{},{},{},{}",
            p.input_power_dbm, m.evm_db, m.crest_factor_db, m.rssi_dbm, m.burst_power_dbm, m.cinr_db, m.cfe_hz,
            m.clock_error_ppm
        )?;
    }
    Ok(())
}

/// An interfering signal on the pair next to the serving layers, at the
/// same IF.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interferer {
    pub rat: Rat,
    pub power_dbm: f64,
    pub bandwidth_hz: f64,
}

/// Multi-layer downlink through the passive chain. Layer `l` rides pair
/// `l`; the interferer, when present, rides pair `rank`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThroughputScenario {
    pub cable: CableSpec,
    pub frontend: FrontEndSpec,
    pub rat: Rat,
    pub bandwidth_hz: f64,
    pub power_dbm: f64,
    pub rank: u32,
    /// Output-referred receiver noise floor.
    pub noise_psd_dbm_hz: f64,
    pub if_hz: Vec<f64>,
    pub mcs: Vec<u32>,
    pub interferer: Option<Interferer>,
    pub model: ThroughputModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThroughputRow {
    pub mcs: u32,
    pub if_hz: f64,
    pub case: String,
    pub throughput_mbps: f64,
    /// Worst layer SINR.
    pub sinr_db: f64,
}

pub const CASE_CLEAN: &str = "clean";
pub const CASE_COEXIST: &str = "coexist";

impl ThroughputScenario {
    pub fn validate(&self) -> Result<()> {
        self.cable.validate()?;
        self.frontend.validate()?;
        let pairs_needed = self.rank as usize + usize::from(self.interferer.is_some());
        if self.rank == 0 || pairs_needed > self.cable.num_pairs {
            return Err(Error::Domain(format!(
                "rank {} plus interferer needs {pairs_needed} pairs, cable has {}",
                self.rank, self.cable.num_pairs
            )));
        }
        if self.if_hz.is_empty() || self.mcs.is_empty() {
            return Err(Error::Domain("throughput sweep needs IF values and MCS indices".into()));
        }
        if let Some(i) = &self.interferer {
            if !(i.bandwidth_hz > 0.0) || !i.power_dbm.is_finite() {
                return Err(Error::Domain("interferer needs finite power and positive bandwidth".into()));
            }
        }
        let table = McsTable::builtin(self.rat)?;
        for &m in &self.mcs {
            table.entry(m)?;
        }
        Ok(())
    }

    /// SINR of every layer at `if_hz`.
    pub fn layer_sinr_db(&self, if_hz: f64, with_interferer: bool) -> Result<Vec<f64>> {
        let hb = frontend_gain(if_hz, &self.frontend)?.norm_sqr();
        let noise = dbm_to_mw(self.noise_psd_dbm_hz) * self.bandwidth_hz;
        (0..self.rank as usize)
            .map(|l| {
                let s = dbm_to_mw(self.power_dbm) * hb * hb * pair_gain(if_hz, l, &self.cable)?.norm_sqr();
                let mut i = 0.0;
                if let (true, Some(int)) = (with_interferer, &self.interferer) {
                    let share = (self.bandwidth_hz / int.bandwidth_hz).min(1.0);
                    let x = fext_gain(if_hz, self.rank as usize, l, &self.cable)?.norm_sqr();
                    i = dbm_to_mw(int.power_dbm) * share * hb * hb * x;
                }
                Ok(power_to_db(s / (noise + i)))
            })
            .collect()
    }

    /// Throughput for every (IF, case, MCS), in that nesting order.
    pub fn run(&self) -> Result<Vec<ThroughputRow>> {
        self.validate()?;
        let mut cases = vec![(CASE_CLEAN, false)];
        if self.interferer.is_some() {
            cases.push((CASE_COEXIST, true));
        }
        let mut rows = Vec::new();
        for &f in &self.if_hz {
            for &(name, with) in &cases {
                let sinr = self.layer_sinr_db(f, with)?;
                let worst = sinr.iter().copied().fold(f64::INFINITY, f64::min);
                for &m in &self.mcs {
                    let tp = sinr
                        .iter()
                        .map(|&s| self.model.throughput_mbps(s, m, self.rat, self.bandwidth_hz, 1))
                        .sum::<Result<f64>>()?;
                    rows.push(ThroughputRow {
                        mcs: m,
                        if_hz: f,
                        case: name.to_string(),
                        throughput_mbps: tp,
                        sinr_db: worst,
                    });
                }
            }
        }
        Ok(rows)
    }
}

pub const THROUGHPUT_CSV_HEADER: &str = "mcs,if_hz,case,throughput_mbps";

pub fn write_throughput_csv<W: std::io::Write>(rows: &[ThroughputRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{THROUGHPUT_CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.mcs, r.if_hz, r.case, r.throughput_mbps)?;
    }
    Ok(())
}

/// Shape descriptors of an EVM-versus-power sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvmSummary {
    pub min_evm_db: f64,
    pub min_at_dbm: f64,
    /// Non-increasing up to the minimum and non-decreasing after it.
    pub quasi_convex: bool,
    pub threshold_db: f64,
    /// Interpolated input power below the optimum at which the EVM rises
    /// through `threshold_db`; `None` if it never does inside the sweep.
    pub low_crossing_dbm: Option<f64>,
    /// Largest `|EVM_dB + SNR_dB|` over points at least `awgn_backoff_db`
    /// below the optimum.
    pub awgn_max_deviation_db: f64,
    pub awgn_backoff_db: f64,
}

/// Summarizes a sweep whose points are sorted by input power.
pub fn summarize_evm(points: &[SweepPoint], threshold_db: f64, awgn_backoff_db: f64) -> Result<EvmSummary> {
    if points.is_empty() {
        return Err(Error::Domain("empty sweep".into()));
    }
    if points.windows(2).any(|w| !(w[1].input_power_dbm > w[0].input_power_dbm)) {
        return Err(Error::Domain("sweep powers must be strictly increasing".into()));
    }
    let evm: Vec<f64> = points.iter().map(|p| p.metrics.evm_db).collect();
    let k = evm
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let quasi_convex =
        evm[..=k].windows(2).all(|w| w[1] <= w[0]) && evm[k..].windows(2).all(|w| w[1] >= w[0]);
    let low_crossing_dbm = (1..=k).rev().find_map(|i| {
        let (hi, lo) = (&points[i], &points[i - 1]);
        let (e_hi, e_lo) = (hi.metrics.evm_db, lo.metrics.evm_db);
        (e_hi <= threshold_db && e_lo > threshold_db).then(|| {
            let t = (threshold_db - e_hi) / (e_lo - e_hi);
            hi.input_power_dbm + t * (lo.input_power_dbm - hi.input_power_dbm)
        })
    });
    let limit = points[k].input_power_dbm - awgn_backoff_db;
    let awgn_max_deviation_db = points
        .iter()
        .filter(|p| p.input_power_dbm <= limit)
        .map(|p| (p.metrics.evm_db + p.snr_db).abs())
        .fold(0.0, f64::max);
    Ok(EvmSummary {
        min_evm_db: evm[k],
        min_at_dbm: points[k].input_power_dbm,
        quasi_convex,
        threshold_db,
        low_crossing_dbm,
        awgn_max_deviation_db,
        awgn_backoff_db,
    })
}

/// How much the coexisting signal costs at one IF.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoexistenceImpact {
    pub if_hz: f64,
    /// Lowest MCS losing more than `tolerance` of its clean throughput.
    pub first_degraded_mcs: Option<u32>,
    /// Largest relative loss among the MCS below `first_degraded_mcs`.
    pub max_loss_below: f64,
    pub tolerance: f64,
}

/// Compares the clean and coexistence rows of a throughput run per IF.
pub fn coexistence_impact(rows: &[ThroughputRow], tolerance: f64) -> Vec<CoexistenceImpact> {
    let mut ifs: Vec<f64> = Vec::new();
    for r in rows {
        if !ifs.contains(&r.if_hz) {
            ifs.push(r.if_hz);
        }
    }
    ifs.into_iter()
        .map(|f| {
            let mut pairs: Vec<(u32, f64)> = rows
                .iter()
                .filter(|r| r.if_hz == f && r.case == CASE_CLEAN)
                .filter_map(|c| {
                    rows.iter()
                        .find(|r| r.if_hz == f && r.case == CASE_COEXIST && r.mcs == c.mcs)
                        .map(|x| {
                            let loss = if c.throughput_mbps > 0.0 {
                                1.0 - x.throughput_mbps / c.throughput_mbps
                            } else {
                                0.0
                            };
                            (c.mcs, loss)
                        })
                })
                .collect();
            pairs.sort_by_key(|p| p.0);
            let first = pairs.iter().find(|p| p.1 > tolerance).map(|p| p.0);
            let max_loss_below = pairs
                .iter()
                .filter(|p| first.is_none_or(|m| p.0 < m))
                .map(|p| p.1)
                .fold(0.0, f64::max);
            CoexistenceImpact { if_hz: f, first_degraded_mcs: first, max_loss_below, tolerance }
        })
        .collect()
}
