//! Line-by-line simulation of the analog chain.
//!
//! Real signals are tracked as sets of spectral lines `Re{a·e^{j2πft}}` with
//! `f > 0`. A cosine mixer splits each line into sum and difference lines at
//! half amplitude; a difference line at negative frequency folds back as the
//! conjugate. Filters multiply each line by the response at its frequency.
//! Nothing here reuses the assembler's bookkeeping.

use num_complex::Complex64;

use super::{if_of, LinkOptions, SignalSpec};
use crate::channel_models::{fext_gain, frontend_gain, pair_gain, CableSpec, FrontEndSpec};
use crate::sf2sf::Sf2sfMapping;
use crate::{Error, Result};

/// Undoes the half-amplitude loss of an ideal cosine mixer, matching the
/// unit conversion gain of the assembled model.
const COSINE_MIX_NORMALIZATION: f64 = 2.0;

const MERGE_TOL_HZ: f64 = 1e-3;
const SELECT_TOL_HZ: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub freq_hz: f64,
    pub amp: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToneInput {
    pub port: usize,
    pub freq_hz: f64,
    pub amp: Complex64,
}

fn cos_mix(lines: &[Line], f_lo: f64) -> Vec<Line> {
    let mut out = Vec::with_capacity(lines.len() * 2);
    for l in lines {
        let half = l.amp * 0.5 * COSINE_MIX_NORMALIZATION;
        out.push(Line {
            freq_hz: l.freq_hz + f_lo,
            amp: half,
        });
        let d = l.freq_hz - f_lo;
        if d > 0.0 {
            out.push(Line { freq_hz: d, amp: half });
        } else if d < 0.0 {
            out.push(Line {
                freq_hz: -d,
                amp: half.conj(),
            });
        } else {
            // DC term of a real signal: Re{half}
            out.push(Line {
                freq_hz: 0.0,
                amp: Complex64::new(half.re, 0.0),
            });
        }
    }
    out
}

fn merge(mut lines: Vec<Line>) -> Vec<Line> {
    lines.sort_by(|a, b| a.freq_hz.total_cmp(&b.freq_hz));
    let mut out: Vec<Line> = Vec::with_capacity(lines.len());
    for l in lines {
        match out.last_mut() {
            Some(last) if (l.freq_hz - last.freq_hz).abs() <= MERGE_TOL_HZ => last.amp += l.amp,
            _ => out.push(l),
        }
    }
    out
}

/// Front-end filtering at IF. Lines outside the passband (the mixer sum
/// products) are taken as fully suppressed.
fn frontend(lines: Vec<Line>, fe: &FrontEndSpec) -> Result<Vec<Line>> {
    let (lo, hi) = fe.passband_hz;
    lines
        .into_iter()
        .filter(|l| l.freq_hz >= lo && l.freq_hz <= hi)
        .map(|l| {
            Ok(Line {
                freq_hz: l.freq_hz,
                amp: l.amp * frontend_gain(l.freq_hz, fe)?,
            })
        })
        .collect()
}

/// Propagates RF tones from the input ports to every output port.
pub fn propagate_tones(
    signals: &[SignalSpec],
    mapping: &Sf2sfMapping,
    cable: &CableSpec,
    fe: &FrontEndSpec,
    opts: LinkOptions,
    inputs: &[ToneInput],
) -> Result<Vec<Vec<Line>>> {
    let n_sig = signals.len();
    let n_pairs = cable.num_pairs;
    let lo = &mapping.lo_plan;
    if lo.f_down_hz.len() != n_sig || lo.f_up_hz.len() != n_sig {
        return Err(Error::Domain("LO plan length differs from signal count".into()));
    }
    let pair_of = |n: usize| -> Result<usize> {
        (0..mapping.space.n_pairs())
            .find(|&l| mapping.space.get(l, n))
            .ok_or_else(|| Error::Domain(format!("signal {n} not routed")))
    };

    // near end: mixers, resistive combiner, front-end
    let mut near: Vec<Vec<Line>> = vec![Vec::new(); n_pairs];
    for t in inputs {
        if t.port >= n_sig {
            return Err(Error::Domain(format!("input port {} out of range", t.port)));
        }
        let tone = [Line {
            freq_hz: t.freq_hz,
            amp: t.amp,
        }];
        near[pair_of(t.port)?].extend(cos_mix(&tone, lo.f_down_hz[t.port]));
    }
    let near = near
        .into_iter()
        .map(|ls| frontend(merge(ls), fe))
        .collect::<Result<Vec<_>>>()?;

    // cable: direct pair transfer plus crosstalk from the other pairs
    let mut far: Vec<Vec<Line>> = vec![Vec::new(); n_pairs];
    for (q, dst) in far.iter_mut().enumerate() {
        for (p, src) in near.iter().enumerate() {
            for l in src {
                let h = if p == q {
                    pair_gain(l.freq_hz, q, cable)?
                } else if opts.fext {
                    fext_gain(l.freq_hz, p, q, cable)?
                } else {
                    continue;
                };
                dst.push(Line {
                    freq_hz: l.freq_hz,
                    amp: l.amp * h,
                });
            }
        }
    }
    let far = far
        .into_iter()
        .map(|ls| frontend(merge(ls), fe))
        .collect::<Result<Vec<_>>>()?;

    // far end: splitter, up-conversion per port
    (0..n_sig)
        .map(|n| Ok(merge(cos_mix(&far[pair_of(n)?], lo.f_up_hz[n]))))
        .collect()
}

fn line_at(lines: &[Line], f: f64) -> Complex64 {
    lines
        .iter()
        .filter(|l| (l.freq_hz - f).abs() <= SELECT_TOL_HZ)
        .map(|l| l.amp)
        .sum()
}

/// Output frequency of signal `n` for input offset `delta`: matched LOs put
/// it back at `f0 + δ`; any up/down mismatch shifts it by `f_up - f_down`.
fn output_freq(signals: &[SignalSpec], mapping: &Sf2sfMapping, n: usize, delta: f64) -> f64 {
    signals[n].rf_center_hz + delta + (mapping.lo_plan.f_up_hz[n] - mapping.lo_plan.f_down_hz[n])
}

/// Complex gain of signal `n` on its own output for a unit tone at offset
/// `delta`.
pub fn tone_oracle(
    signals: &[SignalSpec],
    mapping: &Sf2sfMapping,
    cable: &CableSpec,
    fe: &FrontEndSpec,
    opts: LinkOptions,
    n: usize,
    delta: f64,
) -> Result<Complex64> {
    let input = ToneInput {
        port: n,
        freq_hz: signals[n].rf_center_hz + delta,
        amp: Complex64::new(1.0, 0.0),
    };
    let out = propagate_tones(signals, mapping, cable, fe, opts, &[input])?;
    Ok(line_at(&out[n], output_freq(signals, mapping, n, delta)))
}

/// Gain from input `m` into output `n` at output offset `delta`.
///
/// The input tone is placed where it reaches the IF that output `n` reads at
/// `delta`, if that IF lies inside signal `m`'s band; otherwise `m` is driven
/// at its own offset `delta` and whatever leaks onto the target line is
/// reported.
#[allow(clippy::too_many_arguments)]
pub fn tone_oracle_cross(
    signals: &[SignalSpec],
    mapping: &Sf2sfMapping,
    cable: &CableSpec,
    fe: &FrontEndSpec,
    opts: LinkOptions,
    n: usize,
    m: usize,
    delta: f64,
) -> Result<Complex64> {
    if n == m {
        return tone_oracle(signals, mapping, cable, fe, opts, n, delta);
    }
    let lo = &mapping.lo_plan;
    let (if_n, _) = if_of(signals[n].rf_center_hz, lo.f_down_hz[n])?;
    let x = if lo.f_up_hz[n] > signals[n].rf_center_hz {
        if_n - delta
    } else {
        if_n + delta
    };
    let (if_m, m_high) = if_of(signals[m].rf_center_hz, lo.f_down_hz[m])?;
    let delta_m = if (x - if_m).abs() < signals[m].bandwidth_hz / 2.0 {
        if m_high {
            if_m - x
        } else {
            x - if_m
        }
    } else {
        delta
    };
    let input = ToneInput {
        port: m,
        freq_hz: signals[m].rf_center_hz + delta_m,
        amp: Complex64::new(1.0, 0.0),
    };
    let out = propagate_tones(signals, mapping, cable, fe, opts, &[input])?;
    Ok(line_at(&out[n], output_freq(signals, mapping, n, delta)))
}
