use super::validate::{if_band, image_hits};
use super::{InjectionSide, SpaceMap};
use crate::channel_models::FrontEndSpec;
use crate::link_algebra::{LoPlan, SignalSpec};
use crate::{Error, Result};

/// Number of ways to place `n` distinguishable signals on `l` pairs with at
/// most `m` per pair.
pub fn space_mapping_count(n: usize, l: usize, m: usize) -> u128 {
    // dp over pairs: ways[k] = placements of k chosen signals so far
    let binom = |a: usize, b: usize| -> u128 {
        if b > a {
            return 0;
        }
        (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128)
    };
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for _ in 0..l {
        let mut next = vec![0u128; n + 1];
        for (used, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for take in 0..=m.min(n - used) {
                next[used + take] += w * binom(n - used, take);
            }
        }
        ways = next;
    }
    ways[n]
}

/// All assignments of `n_signals` signals to `n_pairs` slices with at most
/// `per_pair` each, in lexicographic order of the per-signal pair index.
pub fn enumerate_space_mappings(
    n_signals: usize,
    n_pairs: usize,
    per_pair: usize,
) -> Result<Vec<SpaceMap>> {
    if n_signals > per_pair * n_pairs {
        return Err(Error::Infeasible(format!(
            "{n_signals} signals do not fit on {n_pairs} pairs x {per_pair}"
        )));
    }
    let mut out = Vec::new();
    let mut assign = vec![0usize; n_signals];
    let mut load = vec![0usize; n_pairs];
    fn rec(
        n: usize,
        assign: &mut [usize],
        load: &mut [usize],
        per_pair: usize,
        out: &mut Vec<SpaceMap>,
    ) {
        if n == assign.len() {
            out.push(SpaceMap::from_assignment(assign, load.len()).expect("in range"));
            return;
        }
        for l in 0..load.len() {
            if load[l] < per_pair {
                load[l] += 1;
                assign[n] = l;
                rec(n + 1, assign, load, per_pair, out);
                load[l] -= 1;
            }
        }
    }
    rec(0, &mut assign, &mut load, per_pair, &mut out);
    Ok(out)
}

/// LO that puts `rf` at IF `if_hz` with the given injection side.
pub fn lo_for_slot(rf_hz: f64, if_hz: f64, side: InjectionSide) -> Option<f64> {
    let lo = match side {
        InjectionSide::High => rf_hz + if_hz,
        InjectionSide::Low => rf_hz - if_hz,
    };
    (lo > 0.0 && if_hz > 0.0).then_some(lo)
}

/// Whether signal `n` at IF `if_n` can share a slice with already-placed
/// signal `m` at `if_m`: disjoint IF bands and no image landing either way.
fn compatible(
    signals: &[SignalSpec],
    n: usize,
    if_n: f64,
    lo_n: f64,
    m: usize,
    if_m: f64,
    lo_m: f64,
) -> bool {
    let (a, b) = (
        if_band(if_n, signals[n].bandwidth_hz),
        if_band(if_m, signals[m].bandwidth_hz),
    );
    if a.0 < b.1 && b.0 < a.1 {
        return false;
    }
    !image_hits(lo_n, if_n, signals[m].rf_center_hz, if_m, signals[m].bandwidth_hz)
        && !image_hits(lo_m, if_m, signals[n].rf_center_hz, if_n, signals[n].bandwidth_hz)
}

fn in_band(fe: &FrontEndSpec, s: &SignalSpec, if_hz: f64) -> bool {
    let (a, b) = if_band(if_hz, s.bandwidth_hz);
    fe.contains(a, b)
}

/// Every assignment of IF slots to signals that is injective on each pair
/// and passes the passband, overlap and image checks. Ordered
/// lexicographically by slot index per signal.
pub fn enumerate_frequency_plans(
    signals: &[SignalSpec],
    space: &SpaceMap,
    if_slots_hz: &[f64],
    fe: &FrontEndSpec,
    side: InjectionSide,
) -> Result<Vec<LoPlan>> {
    if if_slots_hz.is_empty() {
        return Err(Error::Domain("IF slot list is empty".into()));
    }
    let pairs = space
        .assignment()
        .ok_or_else(|| Error::Domain("space map has a signal without a unique pair".into()))?;
    if pairs.len() != signals.len() {
        return Err(Error::Domain("space map and signal list differ in size".into()));
    }
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(signals.len());
    let mut los: Vec<f64> = Vec::with_capacity(signals.len());

    #[allow(clippy::too_many_arguments)]
    fn rec(
        signals: &[SignalSpec],
        pairs: &[usize],
        slots: &[f64],
        fe: &FrontEndSpec,
        side: InjectionSide,
        chosen: &mut Vec<usize>,
        los: &mut Vec<f64>,
        out: &mut Vec<LoPlan>,
    ) {
        let n = chosen.len();
        if n == signals.len() {
            out.push(LoPlan::matched(los.clone()));
            return;
        }
        for (k, &if_hz) in slots.iter().enumerate() {
            let Some(lo) = lo_for_slot(signals[n].rf_center_hz, if_hz, side) else {
                continue;
            };
            if !in_band(fe, &signals[n], if_hz) {
                continue;
            }
            let ok = (0..n).filter(|&m| pairs[m] == pairs[n]).all(|m| {
                chosen[m] != k && compatible(signals, n, if_hz, lo, m, slots[chosen[m]], los[m])
            });
            if !ok {
                continue;
            }
            chosen.push(k);
            los.push(lo);
            rec(signals, pairs, slots, fe, side, chosen, los, out);
            chosen.pop();
            los.pop();
        }
    }
    rec(signals, &pairs, if_slots_hz, fe, side, &mut chosen, &mut los, &mut out);
    Ok(out)
}

/// Order in which signals claim slots: widest first, then by index.
pub(crate) fn fill_order(signals: &[SignalSpec]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..signals.len()).collect();
    order.sort_by(|&a, &b| {
        signals[b]
            .bandwidth_hz
            .total_cmp(&signals[a].bandwidth_hz)
            .then(a.cmp(&b))
    });
    order
}

/// Lowest feasible slot for signal `n` on a pair already holding `placed`
/// (signal index, slot index, LO).
pub(crate) fn lowest_slot(
    signals: &[SignalSpec],
    n: usize,
    placed: &[(usize, usize, f64)],
    slots: &[f64],
    fe: &FrontEndSpec,
    side: InjectionSide,
) -> Option<(usize, f64)> {
    slots.iter().enumerate().find_map(|(k, &if_hz)| {
        let lo = lo_for_slot(signals[n].rf_center_hz, if_hz, side)?;
        let ok = in_band(fe, &signals[n], if_hz)
            && placed
                .iter()
                .all(|&(m, km, lo_m)| km != k && compatible(signals, n, if_hz, lo, m, slots[km], lo_m));
        ok.then_some((k, lo))
    })
}

/// Deterministic frequency plan for a space map: signals in
/// (descending bandwidth, index) order each take the lowest slot that keeps
/// their pair valid. `None` if some signal finds no slot.
pub fn canonical_frequency_plan(
    signals: &[SignalSpec],
    space: &SpaceMap,
    if_slots_hz: &[f64],
    fe: &FrontEndSpec,
    side: InjectionSide,
) -> Option<LoPlan> {
    let pairs = space.assignment()?;
    let mut per_pair: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); space.n_pairs()];
    let mut los = vec![0.0; signals.len()];
    for n in fill_order(signals) {
        let l = pairs[n];
        let (k, lo) = lowest_slot(signals, n, &per_pair[l], if_slots_hz, fe, side)?;
        per_pair[l].push((n, k, lo));
        los[n] = lo;
    }
    Some(LoPlan::matched(los))
}
