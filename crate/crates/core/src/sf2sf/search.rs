//! Exhaustive and greedy SF2SF mapping search.

use serde::{Deserialize, Serialize};

use super::enumerate::{canonical_frequency_plan, enumerate_space_mappings, fill_order, lowest_slot};
use super::{InjectionSide, Sf2sfMapping, SpaceMap};
use crate::beamforming::{sweep_with_channel, BeamScenario, SinrCurve};
use crate::channel_models::{fext_gain, frontend_gain, pair_gain, CableSpec, FrontEndSpec};
use crate::link_algebra::{LinkModel, LinkOptions, LoPlan, SignalSpec};
use crate::units::{amplitude_to_db, power_to_db, MHZ};
use crate::{Error, Result};

/// Reduction of a per-θ SINR curve to the scalar a mapping is ranked by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scalarization {
    #[default]
    Mean,
    Min,
    /// SINR at the grid angle nearest to this one, in degrees.
    FixedTheta(f64),
}

impl Scalarization {
    pub fn apply(&self, curve: &SinrCurve) -> f64 {
        match *self {
            Self::Mean => curve.mean_db(),
            Self::Min => curve.min_db(),
            Self::FixedTheta(t) => curve.at(t).unwrap_or(f64::NEG_INFINITY),
        }
    }
}

/// Search domain shared by the exhaustive and greedy strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    /// Signals per slice (`M`).
    pub per_pair: usize,
    pub if_slots_hz: Vec<f64>,
    pub side: InjectionSide,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            per_pair: 2,
            if_slots_hz: vec![50.0 * MHZ, 75.0 * MHZ, 175.0 * MHZ, 400.0 * MHZ],
            side: InjectionSide::High,
        }
    }
}

impl SearchSpace {
    /// Every space mapping of `signals` onto `n_pairs` pairs, each with its
    /// canonical frequency plan. Space maps for which no plan exists are
    /// dropped.
    pub fn candidates(
        &self,
        signals: &[SignalSpec],
        n_pairs: usize,
        fe: &FrontEndSpec,
    ) -> Result<Vec<Sf2sfMapping>> {
        if self.if_slots_hz.is_empty() {
            return Err(Error::Domain("IF slot list is empty".into()));
        }
        let spaces = enumerate_space_mappings(signals.len(), n_pairs, self.per_pair)?;
        let total = spaces.len();
        let out: Vec<Sf2sfMapping> = spaces
            .into_iter()
            .filter_map(|space| {
                let lo_plan = canonical_frequency_plan(signals, &space, &self.if_slots_hz, fe, self.side)?;
                Some(Sf2sfMapping { space, lo_plan, per_pair: self.per_pair })
            })
            .collect();
        if out.len() < total {
            log::info!("{} of {total} space mappings have no feasible frequency plan", total - out.len());
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_index: usize,
    pub best: Sf2sfMapping,
    pub best_objective: f64,
    /// Scalarized objective of every candidate, in input order.
    pub objectives: Vec<f64>,
    /// One curve per candidate, in input order.
    pub curves: Vec<SinrCurve>,
    /// Pointwise maximum over candidates (per-θ re-optimised mapping).
    pub envelope: SinrCurve,
    /// Candidate attaining the envelope at each θ.
    pub envelope_argmax: Vec<usize>,
    /// Largest best-minus-worst spread over θ.
    pub dispersion_db: f64,
    pub dispersion_theta_deg: f64,
}

impl SearchResult {
    pub fn best_curve(&self) -> &SinrCurve {
        &self.curves[self.best_index]
    }
}

fn evaluate(
    scenario: &BeamScenario,
    signals: &[SignalSpec],
    cable: &CableSpec,
    fe: &FrontEndSpec,
    opts: LinkOptions,
    idx: usize,
    mapping: &Sf2sfMapping,
) -> Result<SinrCurve> {
    let model = LinkModel::new(signals, mapping, cable, fe, opts)?;
    sweep_with_channel(scenario, &model.snapshot(scenario.delta_hz)?, format!("c{idx:04}"))
}

/// Evaluates every candidate over the scenario's θ sweep and returns the one
/// maximizing `scalar`. Ties go to the lowest mapping under
/// [`Sf2sfMapping::order_cmp`].
pub fn exhaustive_search(
    scenario: &BeamScenario,
    scalar: Scalarization,
    signals: &[SignalSpec],
    cable: &CableSpec,
    fe: &FrontEndSpec,
    opts: LinkOptions,
    candidates: &[Sf2sfMapping],
) -> Result<SearchResult> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    scenario.validate()?;

    #[cfg(feature = "parallel")]
    let curves: Vec<SinrCurve> = {
        use rayon::prelude::*;
        candidates
            .par_iter()
            .enumerate()
            .map(|(i, m)| evaluate(scenario, signals, cable, fe, opts, i, m))
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let curves: Vec<SinrCurve> = candidates
        .iter()
        .enumerate()
        .map(|(i, m)| evaluate(scenario, signals, cable, fe, opts, i, m))
        .collect::<Result<_>>()?;

    let objectives: Vec<f64> = curves.iter().map(|c| scalar.apply(c)).collect();
    let mut best_index = 0;
    for i in 1..candidates.len() {
        let (o, b) = (objectives[i], objectives[best_index]);
        if o > b || (o == b && candidates[i].order_cmp(&candidates[best_index]).is_lt()) {
            best_index = i;
        }
    }

    let thetas = curves[0].theta_deg.clone();
    let mut env = Vec::with_capacity(thetas.len());
    let mut arg = Vec::with_capacity(thetas.len());
    let mut dispersion = 0.0;
    let mut dispersion_theta = thetas[0];
    for (k, &t) in thetas.iter().enumerate() {
        let mut hi = (0, curves[0].sinr_db[k]);
        let mut lo = curves[0].sinr_db[k];
        for (i, c) in curves.iter().enumerate().skip(1) {
            let v = c.sinr_db[k];
            if v > hi.1 {
                hi = (i, v);
            }
            lo = lo.min(v);
        }
        env.push(hi.1);
        arg.push(hi.0);
        let spread = hi.1 - lo;
        if spread > dispersion {
            dispersion = spread;
            dispersion_theta = t;
        }
    }

    Ok(SearchResult {
        best_index,
        best: candidates[best_index].clone(),
        best_objective: objectives[best_index],
        objectives,
        envelope: SinrCurve { theta_deg: thetas, sinr_db: env, mapping_id: "envelope".into() },
        envelope_argmax: arg,
        curves,
        dispersion_db: dispersion,
        dispersion_theta_deg: dispersion_theta,
    })
}

/// Per-signal cost of a placement: chain loss at the IF plus the FEXT
/// interference-to-signal ratio from already placed signals on other pairs
/// whose IF bands overlap.
#[allow(clippy::too_many_arguments)]
fn placement_cost(
    signals: &[SignalSpec],
    cable: &CableSpec,
    fe: &FrontEndSpec,
    opts: LinkOptions,
    n: usize,
    pair: usize,
    if_hz: f64,
    others: &[(usize, usize, f64)],
) -> Result<f64> {
    let hb = frontend_gain(if_hz, fe)?.norm();
    let hc = pair_gain(if_hz, pair, cable)?.norm();
    let loss_db = -amplitude_to_db(hb * hb * hc);
    let mut ratio = 0.0;
    if opts.fext {
        let half_n = signals[n].bandwidth_hz / 2.0;
        for &(m, pm, if_m) in others {
            if pm == pair {
                continue;
            }
            let half_m = signals[m].bandwidth_hz / 2.0;
            if (if_m - if_hz).abs() < half_m + half_n {
                let x = fext_gain(if_hz, pm, pair, cable)?.norm();
                ratio += (x / hc.max(f64::MIN_POSITIVE)).powi(2);
            }
        }
    }
    Ok(loss_db + power_to_db(1.0 + ratio))
}

/// Scalable alternative to [`exhaustive_search`]: signals in
/// (descending bandwidth, index) order take the pair and lowest feasible
/// slot of least cost, ties to the lowest pair.
///
/// The result coincides with the candidate that [`SearchSpace::candidates`]
/// produces for the same space map.
pub fn greedy_mapping(
    signals: &[SignalSpec],
    cable: &CableSpec,
    fe: &FrontEndSpec,
    space: &SearchSpace,
    opts: LinkOptions,
) -> Result<Sf2sfMapping> {
    cable.validate()?;
    fe.validate()?;
    let l_count = cable.num_pairs;
    if signals.len() > l_count * space.per_pair {
        return Err(Error::Infeasible(format!(
            "{} signals do not fit {l_count} pairs of {} slots",
            signals.len(),
            space.per_pair
        )));
    }
    let mut per_pair: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); l_count];
    let mut placed: Vec<(usize, usize, f64)> = Vec::new();
    let mut assign = vec![0usize; signals.len()];
    let mut los = vec![0.0; signals.len()];

    for n in fill_order(signals) {
        let mut best: Option<(f64, usize, usize, f64)> = None;
        for (l, on_pair) in per_pair.iter().enumerate() {
            if on_pair.len() >= space.per_pair {
                continue;
            }
            let Some((k, lo)) = lowest_slot(signals, n, on_pair, &space.if_slots_hz, fe, space.side)
            else {
                continue;
            };
            let cost = placement_cost(signals, cable, fe, opts, n, l, space.if_slots_hz[k], &placed)?;
            if best.is_none_or(|b| cost < b.0) {
                best = Some((cost, l, k, lo));
            }
        }
        let (_, l, k, lo) = best.ok_or_else(|| {
            Error::Infeasible(format!("no pair has a feasible slot for signal {}", signals[n].id))
        })?;
        per_pair[l].push((n, k, lo));
        placed.push((n, l, space.if_slots_hz[k]));
        assign[n] = l;
        los[n] = lo;
    }
    Ok(Sf2sfMapping {
        space: SpaceMap::from_assignment(&assign, l_count)?,
        lo_plan: LoPlan::matched(los),
        per_pair: space.per_pair,
    })
}
