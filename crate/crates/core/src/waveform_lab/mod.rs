//! Link-level reproduction of the lab measurements: OFDM test signals, the
//! passive-chain impairments and the analyzer metrics, plus an MCS →
//! throughput abstraction.

mod chain;
mod metrics;
mod ofdm;
mod sweeps;
mod throughput;

pub use chain::{apply_chain, soft_limit, ImpairmentChain};
pub use metrics::{
    cfo_bin_hz, clock_error_ppm, estimate_cfo, measure_crest_factor, measure_evm, measure_link,
    measure_power_metrics, LinkMetrics, PowerMetrics, Tcxo, CINR_CAP_DB, EVM_FLOOR_DB,
};
pub use ofdm::{gen_waveform, CodeRate, Modulation, Waveform, WaveformSpec};
pub use sweeps::{
    coexistence_impact, evm_sweep, power_grid, summarize_evm, write_evm_csv, write_throughput_csv, CoexistenceImpact, EvmSummary, EvmSweep, Interferer, SweepPoint,
    ThroughputRow, ThroughputScenario, CASE_CLEAN, CASE_COEXIST, EVM_CSV_HEADER, THROUGHPUT_CSV_HEADER,
};
pub use throughput::{throughput_mbps, McsEntry, McsTable, ThroughputModel};
