//! Space-frequency to space-frequency (SF2SF) mapping.
//!
//! The space part is the binary `L×N` matrix `Π_b`: entry `(l, n)` is 1 iff
//! RF signal `n` feeds signal slice `l`, and slice `l` is hard-wired to
//! twisted pair `l`. The frequency part is the LO plan, which fixes each
//! signal's IF on its pair.

mod enumerate;
mod search;
mod validate;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use enumerate::{
    canonical_frequency_plan, enumerate_frequency_plans, enumerate_space_mappings,
    lo_for_slot, space_mapping_count,
};
pub use search::{exhaustive_search, greedy_mapping, Scalarization, SearchResult, SearchSpace};
pub use validate::validate_mapping;

use crate::link_algebra::{if_of, LoPlan, SignalSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InjectionSide {
    #[default]
    High,
    Low,
}

/// Binary space-mapping matrix, `n_pairs × n_signals`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceMap {
    n_pairs: usize,
    n_signals: usize,
    bits: Vec<bool>,
}

impl SpaceMap {
    pub fn zeros(n_pairs: usize, n_signals: usize) -> Self {
        Self {
            n_pairs,
            n_signals,
            bits: vec![false; n_pairs * n_signals],
        }
    }

    /// From the pair index of every signal.
    pub fn from_assignment(pairs: &[usize], n_pairs: usize) -> Result<Self> {
        let mut m = Self::zeros(n_pairs, pairs.len());
        for (n, &l) in pairs.iter().enumerate() {
            if l >= n_pairs {
                return Err(Error::Domain(format!(
                    "signal {n} assigned to pair {l} of {n_pairs}"
                )));
            }
            m.set(l, n, true);
        }
        Ok(m)
    }

    /// From rows of `0`/`1` characters (whitespace ignored), one per pair.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::Domain(format!("bad matrix digit {other:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let n_signals = parsed.first().map_or(0, |r| r.len());
        if parsed.iter().any(|r| r.len() != n_signals) {
            return Err(Error::Domain("space matrix rows differ in length".into()));
        }
        Ok(Self {
            n_pairs: parsed.len(),
            n_signals,
            bits: parsed.into_iter().flatten().collect(),
        })
    }

    pub fn to_rows(&self) -> Vec<String> {
        (0..self.n_pairs)
            .map(|l| {
                (0..self.n_signals)
                    .map(|n| if self.get(l, n) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn n_signals(&self) -> usize {
        self.n_signals
    }

    pub fn get(&self, l: usize, n: usize) -> bool {
        self.bits[l * self.n_signals + n]
    }

    pub fn set(&mut self, l: usize, n: usize, v: bool) {
        self.bits[l * self.n_signals + n] = v;
    }

    /// Pair of signal `n` when its column has exactly one 1.
    pub fn pair_of(&self, n: usize) -> Option<usize> {
        let mut it = (0..self.n_pairs).filter(|&l| self.get(l, n));
        match (it.next(), it.next()) {
            (Some(l), None) => Some(l),
            _ => None,
        }
    }

    pub fn assignment(&self) -> Option<Vec<usize>> {
        (0..self.n_signals).map(|n| self.pair_of(n)).collect()
    }

    pub fn row_count(&self, l: usize) -> usize {
        (0..self.n_signals).filter(|&n| self.get(l, n)).count()
    }
}

/// A complete SF2SF mapping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sf2sfMapping {
    pub space: SpaceMap,
    pub lo_plan: LoPlan,
    /// Signals a slice can multiplex (`M`).
    pub per_pair: usize,
}

impl Sf2sfMapping {
    /// IF center and down-conversion orientation of every signal.
    pub fn if_centers(&self, signals: &[SignalSpec]) -> Result<Vec<(f64, bool)>> {
        signals
            .iter()
            .zip(&self.lo_plan.f_down_hz)
            .map(|(s, &lo)| if_of(s.rf_center_hz, lo))
            .collect()
    }

    /// Total order used for deterministic tie-breaking: pair index of each
    /// signal, then the down-conversion LO of each signal.
    pub fn order_cmp(&self, other: &Self) -> Ordering {
        let a = self.space.assignment();
        let b = other.space.assignment();
        a.cmp(&b).then_with(|| {
            self.lo_plan
                .f_down_hz
                .iter()
                .zip(&other.lo_plan.f_down_hz)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    OutOfBand,
    SameChainOverlap,
    ImageCollision,
    NetInversion,
    ColumnCount,
    RowCount,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingViolation {
    pub kind: ViolationKind,
    pub detail: String,
    /// Signal ids involved.
    pub offenders: Vec<usize>,
}

impl MappingViolation {
    fn new(kind: ViolationKind, offenders: Vec<usize>, detail: String) -> Self {
        Self {
            kind,
            detail,
            offenders,
        }
    }
}

impl fmt::Display for MappingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?}: {}", self.kind, self.offenders, self.detail)
    }
}
