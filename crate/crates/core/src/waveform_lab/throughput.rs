//! MCS → throughput link abstraction.
//!
//! Rates and SNR thresholds live in versioned CSV tables under `data/`.
//! Above its threshold an MCS delivers its full rate; below, efficiency
//! falls linearly to zero over `rolloff_db`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::link_algebra::Rat;
use crate::{Error, Result};

const LTE_TABLE: &str = include_str!("../../data/lte_25prb.csv");
const WIFI_TABLE: &str = include_str!("../../data/wifi_11n_20mhz.csv");
const WIMAX_TABLE: &str = include_str!("../../data/wimax_7mhz.csv");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsEntry {
    pub mcs: u32,
    /// Single-layer rate at the table's nominal bandwidth.
    pub rate_mbps: f64,
    pub snr_threshold_db: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McsTable {
    pub rat: Rat,
    pub nominal_bandwidth_hz: f64,
    pub entries: Vec<McsEntry>,
}

impl McsTable {
    /// Parses a table with a header row containing `mcs`,
    /// `snr_threshold_db` and either `rate_mbps` or `tbs_bits` (bits per
    /// 1 ms TTI). Lines starting with `#` are comments.
    pub fn parse(rat: Rat, nominal_bandwidth_hz: f64, text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::Domain("empty MCS table".into()))?
            .split(',')
            .collect();
        let col = |name: &str| header.iter().position(|h| *h == name);
        let c_mcs = col("mcs").ok_or_else(|| Error::Domain("MCS table lacks an mcs column".into()))?;
        let c_thr = col("snr_threshold_db")
            .ok_or_else(|| Error::Domain("MCS table lacks snr_threshold_db".into()))?;
        let (c_rate, per_tti) = match (col("rate_mbps"), col("tbs_bits")) {
            (Some(c), _) => (c, false),
            (None, Some(c)) => (c, true),
            _ => return Err(Error::Domain("MCS table lacks a rate column".into())),
        };
        let num = |f: &[&str], c: usize| -> Result<f64> {
            f.get(c)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Domain(format!("bad MCS table row {f:?}")))
        };
        let entries = lines
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                let rate = num(&f, c_rate)?;
                Ok(McsEntry {
                    mcs: num(&f, c_mcs)? as u32,
                    rate_mbps: if per_tti { rate / 1000.0 } else { rate },
                    snr_threshold_db: num(&f, c_thr)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rat, nominal_bandwidth_hz, entries })
    }

    pub fn builtin(rat: Rat) -> Result<&'static McsTable> {
        static LTE: OnceLock<McsTable> = OnceLock::new();
        static WIFI: OnceLock<McsTable> = OnceLock::new();
        static WIMAX: OnceLock<McsTable> = OnceLock::new();
        let get = |cell: &'static OnceLock<McsTable>, bw: f64, text: &str| {
            cell.get_or_init(|| McsTable::parse(rat, bw, text).expect("builtin MCS table parses"))
        };
        match rat {
            Rat::Lte => Ok(get(&LTE, 5e6, LTE_TABLE)),
            Rat::Wifi => Ok(get(&WIFI, 20e6, WIFI_TABLE)),
            Rat::Wimax => Ok(get(&WIMAX, 7e6, WIMAX_TABLE)),
            Rat::Generic => Err(Error::UnknownMcs { mcs: 0, rat: rat.name().into() }),
        }
    }

    pub fn entry(&self, mcs: u32) -> Result<&McsEntry> {
        self.entries
            .iter()
            .find(|e| e.mcs == mcs)
            .ok_or_else(|| Error::UnknownMcs { mcs, rat: self.rat.name().into() })
    }

    pub fn max_mcs(&self) -> u32 {
        self.entries.iter().map(|e| e.mcs).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThroughputModel {
    /// Width of the linear BLER roll-off below each threshold.
    pub rolloff_db: f64,
}

impl Default for ThroughputModel {
    fn default() -> Self {
        Self { rolloff_db: 3.0 }
    }
}

impl ThroughputModel {
    /// Fraction of the nominal rate delivered at `snr_db`.
    pub fn efficiency(&self, snr_db: f64, threshold_db: f64) -> f64 {
        if snr_db >= threshold_db {
            1.0
        } else if self.rolloff_db <= 0.0 {
            0.0
        } else {
            (1.0 - (threshold_db - snr_db) / self.rolloff_db).clamp(0.0, 1.0)
        }
    }

    /// Rate in Mbps for `rank` layers, each at `snr_db`. The table rate is
    /// scaled linearly with `bandwidth_hz` relative to its nominal width.
    pub fn throughput_mbps(&self, snr_db: f64, mcs: u32, rat: Rat, bandwidth_hz: f64, rank: u32) -> Result<f64> {
        if snr_db.is_nan() {
            return Err(Error::Domain("SNR is NaN".into()));
        }
        if rank == 0 || !(bandwidth_hz > 0.0) {
            return Err(Error::Domain("rank and bandwidth must be positive".into()));
        }
        let table = McsTable::builtin(rat).map_err(|_| Error::UnknownMcs { mcs, rat: rat.name().into() })?;
        let e = table.entry(mcs)?;
        let scale = bandwidth_hz / table.nominal_bandwidth_hz;
        Ok(e.rate_mbps * scale * rank as f64 * self.efficiency(snr_db, e.snr_threshold_db))
    }
}

/// [`ThroughputModel::throughput_mbps`] with the default roll-off.
pub fn throughput_mbps(snr_db: f64, mcs: u32, rat: Rat, bandwidth_hz: f64, rank: u32) -> Result<f64> {
    ThroughputModel::default().throughput_mbps(snr_db, mcs, rat, bandwidth_hz, rank)
}
