//! Desk-scale model of an analog MIMO radio-over-copper fronthaul.
//!
//! RF antenna signals are down-converted to intermediate frequencies,
//! multiplexed onto the twisted pairs of a LAN cable by a passive
//! LAN-to-coax converter (L2CC), and restored to RF at the far end. The crate
//! covers:
//!
//! - [`channel_models`]: twisted-pair insertion loss, far-end crosstalk and the
//!   passive per-slice front-end, plus end-to-end attenuation calibration;
//! - [`link_algebra`]: the frequency-sampled end-to-end matrices `A(δ)` and
//!   `B(δ)` of `s' = A s + B w_c`, and an independent tone-level oracle;
//! - [`sf2sf`]: space/frequency mapping of RF signals onto (pair, IF) slots,
//!   with validation, enumeration, exhaustive and greedy search;
//! - [`beamforming`]: ULA + MVDR SINR evaluation through the effective channel;
//! - [`waveform_lab`]: OFDM waveforms, passive-chain impairments and the
//!   measured link metrics (EVM, crest factor, RSSI, CINR, CFE, throughput).

// Negated float comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod channel_models;
pub mod error;
pub mod link_algebra;
pub mod presets;
pub mod seeds;
pub mod sf2sf;
pub mod units;
pub mod waveform_lab;

pub use error::{Error, Result};
pub use num_complex::Complex64;
