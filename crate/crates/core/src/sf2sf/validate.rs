use super::{MappingViolation, Sf2sfMapping, ViolationKind};
use crate::channel_models::FrontEndSpec;
use crate::link_algebra::{if_of, SignalSpec};

/// LO mismatch tolerated before a plan counts as detuned.
pub(crate) const LO_MATCH_TOL_HZ: f64 = 1.0;

fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

pub(crate) fn if_band(if_hz: f64, bw: f64) -> (f64, f64) {
    (if_hz - bw / 2.0, if_hz + bw / 2.0)
}

/// Image of signal `n`'s conversion seen by signal `m` on the same slice,
/// centered at `|f_down_n + if_n - f_rf_m|` with `m`'s bandwidth.
pub(crate) fn image_hits(
    lo_n: f64,
    if_n: f64,
    rf_m: f64,
    if_m: f64,
    bw_m: f64,
) -> bool {
    let c = (lo_n + if_n - rf_m).abs();
    overlaps(if_band(c, bw_m), if_band(if_m, bw_m))
}

/// Checks every constraint a mapping must satisfy. An empty list means the
/// mapping is valid; the list is sorted by `(kind, offenders)`.
pub fn validate_mapping(
    signals: &[SignalSpec],
    mapping: &Sf2sfMapping,
    fe: &FrontEndSpec,
) -> Vec<MappingViolation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    let n_sig = signals.len();
    let space = &mapping.space;
    let lo = &mapping.lo_plan;

    if space.n_signals() != n_sig || lo.f_down_hz.len() != n_sig || lo.f_up_hz.len() != n_sig {
        out.push(MappingViolation::new(
            ColumnCount,
            Vec::new(),
            format!(
                "dimension mismatch: {} signals, matrix has {} columns, LO plan has {}/{} entries",
                n_sig,
                space.n_signals(),
                lo.f_down_hz.len(),
                lo.f_up_hz.len()
            ),
        ));
        return out;
    }

    // (e) structural constraints
    for (n, s) in signals.iter().enumerate() {
        let ones = (0..space.n_pairs()).filter(|&l| space.get(l, n)).count();
        if ones != 1 {
            out.push(MappingViolation::new(
                ColumnCount,
                vec![s.id],
                format!("signal {} feeds {ones} slices, expected exactly 1", s.id),
            ));
        }
    }
    for l in 0..space.n_pairs() {
        let count = space.row_count(l);
        if count > mapping.per_pair {
            let ids = (0..n_sig).filter(|&n| space.get(l, n)).map(|n| signals[n].id).collect();
            out.push(MappingViolation::new(
                RowCount,
                ids,
                format!("pair {l} carries {count} signals, capacity {}", mapping.per_pair),
            ));
        }
    }

    // (a) passband, (d) inversion
    let mut ifs: Vec<Option<f64>> = Vec::with_capacity(n_sig);
    for (n, s) in signals.iter().enumerate() {
        match if_of(s.rf_center_hz, lo.f_down_hz[n]) {
            Ok((f_if, _)) => {
                let (a, b) = if_band(f_if, s.bandwidth_hz);
                if !fe.contains(a, b) {
                    out.push(MappingViolation::new(
                        OutOfBand,
                        vec![s.id],
                        format!(
                            "IF band [{a}, {b}] Hz outside passband [{}, {}] Hz",
                            fe.passband_hz.0, fe.passband_hz.1
                        ),
                    ));
                }
                ifs.push(Some(f_if));
            }
            Err(_) => {
                out.push(MappingViolation::new(
                    OutOfBand,
                    vec![s.id],
                    "LO equals RF center (zero IF)".into(),
                ));
                ifs.push(None);
            }
        }
        let (fd, fu) = (lo.f_down_hz[n], lo.f_up_hz[n]);
        let side_flip = (fd > s.rf_center_hz) != (fu > s.rf_center_hz);
        if side_flip || (!lo.allow_detune && (fd - fu).abs() > LO_MATCH_TOL_HZ) {
            out.push(MappingViolation::new(
                NetInversion,
                vec![s.id],
                format!("f_down {fd} Hz and f_up {fu} Hz do not cancel"),
            ));
        }
    }

    // (b) overlap and (c) image collisions within each slice
    for n in 0..n_sig {
        for m in 0..n_sig {
            if n == m {
                continue;
            }
            let (Some(pn), Some(pm)) = (space.pair_of(n), space.pair_of(m)) else {
                continue;
            };
            let (Some(if_n), Some(if_m)) = (ifs[n], ifs[m]) else {
                continue;
            };
            if pn != pm {
                continue;
            }
            if n < m
                && overlaps(
                    if_band(if_n, signals[n].bandwidth_hz),
                    if_band(if_m, signals[m].bandwidth_hz),
                )
            {
                out.push(MappingViolation::new(
                    SameChainOverlap,
                    vec![signals[n].id, signals[m].id],
                    format!("IF bands overlap on pair {pn}"),
                ));
            }
            if image_hits(
                lo.f_down_hz[n],
                if_n,
                signals[m].rf_center_hz,
                if_m,
                signals[m].bandwidth_hz,
            ) {
                out.push(MappingViolation::new(
                    ImageCollision,
                    vec![signals[n].id, signals[m].id],
                    format!(
                        "image of signal {} lands on signal {}'s IF on pair {pn}",
                        signals[n].id, signals[m].id
                    ),
                ));
            }
        }
    }

    out.sort_by(|a, b| (a.kind, &a.offenders).cmp(&(b.kind, &b.offenders)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_algebra::{LoPlan, Rat};
    use crate::sf2sf::SpaceMap;
    use crate::units::MHZ;

    const RF: f64 = 2595.0 * MHZ;

    fn lte(id: usize) -> SignalSpec {
        SignalSpec::new(id, RF, 20.0 * MHZ, Rat::Lte)
    }

    fn fe() -> FrontEndSpec {
        FrontEndSpec::new(50.0 * MHZ, 450.0 * MHZ, 19.0)
    }

    fn mapping(pairs: &[usize], n_pairs: usize, ifs: &[f64], per_pair: usize) -> Sf2sfMapping {
        Sf2sfMapping {
            space: SpaceMap::from_assignment(pairs, n_pairs).unwrap(),
            lo_plan: LoPlan::matched(ifs.iter().map(|f| RF + f * MHZ).collect()),
            per_pair,
        }
    }

    #[test]
    fn same_pair_same_if_overlaps() {
        let sigs = [lte(1), lte(2)];
        let v = validate_mapping(&sigs, &mapping(&[0, 0], 1, &[175.0, 175.0], 2), &fe());
        let kinds: Vec<_> = v.iter().map(|x| x.kind).collect();
        assert!(kinds.contains(&ViolationKind::SameChainOverlap));
        assert_eq!(v[0].kind, ViolationKind::SameChainOverlap);
        assert_eq!(v[0].offenders, vec![1, 2]);
    }

    #[test]
    fn eight_signals_two_slots_per_pair_is_valid() {
        let sigs: Vec<_> = (1..=8).map(lte).collect();
        let m = mapping(
            &[0, 0, 1, 1, 2, 2, 3, 3],
            4,
            &[75.0, 175.0, 75.0, 175.0, 75.0, 175.0, 75.0, 175.0],
            2,
        );
        assert_eq!(validate_mapping(&sigs, &m, &fe()), vec![]);
    }

    #[test]
    fn band_edge_straddle_is_out_of_band() {
        let sigs = [lte(1)];
        // lower band edge 1 Hz below the passband
        let if_hz = 50.0 + 10.0 - 1e-6;
        let v = validate_mapping(&sigs, &mapping(&[0], 1, &[if_hz], 1), &fe());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::OutOfBand);
        let ok = validate_mapping(&sigs, &mapping(&[0], 1, &[60.0], 1), &fe());
        assert!(ok.is_empty());
    }

    #[test]
    fn structural_violations() {
        let sigs: Vec<_> = (1..=3).map(lte).collect();
        let m = mapping(&[0, 0, 0], 2, &[75.0, 175.0, 300.0], 2);
        let v = validate_mapping(&sigs, &m, &fe());
        assert!(v.iter().any(|x| x.kind == ViolationKind::RowCount && x.offenders == vec![1, 2, 3]));

        let mut m = mapping(&[0, 1, 1], 2, &[75.0, 75.0, 175.0], 2);
        m.space.set(1, 0, true);
        let v = validate_mapping(&sigs, &m, &fe());
        assert!(v.iter().any(|x| x.kind == ViolationKind::ColumnCount && x.offenders == vec![1]));
    }

    #[test]
    fn detune_needs_flag() {
        let sigs = [lte(1)];
        let mut m = mapping(&[0], 1, &[140.0], 1);
        m.lo_plan.f_up_hz[0] += 4183.0;
        let v = validate_mapping(&sigs, &m, &fe());
        assert_eq!(v[0].kind, ViolationKind::NetInversion);
        m.lo_plan.allow_detune = true;
        assert!(validate_mapping(&sigs, &m, &fe()).is_empty());
        // flipping the injection side is never allowed
        m.lo_plan.f_up_hz[0] = RF - 140.0 * MHZ;
        assert_eq!(validate_mapping(&sigs, &m, &fe())[0].kind, ViolationKind::NetInversion);
    }

    #[test]
    fn image_rule_flags_double_if() {
        // same RF, IFs 75 and 150: the image of the 75 MHz conversion sits at
        // |f_rf + 75 + 75 - f_rf| = 150 MHz
        let sigs = [lte(1), lte(2)];
        let v = validate_mapping(&sigs, &mapping(&[0, 0], 1, &[75.0, 150.0], 2), &fe());
        assert!(v.iter().any(|x| x.kind == ViolationKind::ImageCollision && x.offenders == vec![1, 2]));
    }

    #[test]
    fn output_is_sorted() {
        let sigs: Vec<_> = (1..=4).map(lte).collect();
        let m = mapping(&[0, 0, 0, 1], 2, &[30.0, 30.0, 175.0, 500.0], 2);
        let v = validate_mapping(&sigs, &m, &fe());
        let keys: Vec<_> = v.iter().map(|x| (x.kind, x.offenders.clone())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(v.len() >= 3);
    }
}
