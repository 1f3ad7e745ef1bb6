use serde::{Deserialize, Serialize};

use super::cable::{pair_insertion_loss_db, CableSpec};
use super::frontend::{frontend_gain, FrontEndSpec};
use crate::units::amplitude_to_db;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    pub length_m: f64,
    pub f_if_hz: f64,
    /// Measured end-to-end attenuation, positive dB.
    pub end_to_end_db: f64,
}

/// Result of [`calibrate_chain`].
///
/// Only the sum of cable and passive-chain loss is observable; the split
/// between `insertion_loss_db` and `atten_scale` is a model fit, not a
/// hardware measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit {
    /// Lumped loss of one L2CC front-end traversal (mixer conversion loss
    /// included).
    pub insertion_loss_db: f64,
    /// Multiplier applied to the cable attenuation coefficients.
    pub atten_scale: f64,
    pub modeled_db: Vec<f64>,
    /// `modeled - target`, dB.
    pub residuals_db: Vec<f64>,
}

impl CalibrationFit {
    pub fn apply(&self, cable: &CableSpec, fe: &FrontEndSpec) -> (CableSpec, FrontEndSpec) {
        let mut c = cable.clone();
        c.atten = c.atten.scaled(self.atten_scale);
        let mut f = fe.clone();
        f.insertion_loss_db = self.insertion_loss_db;
        (c, f)
    }

    pub fn max_abs_residual_db(&self) -> f64 {
        self.residuals_db.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// End-to-end attenuation (positive dB) of nominal pair 0: front-end, cable,
/// front-end, at IF `f_hz`.
pub fn end_to_end_loss_db(cable: &CableSpec, fe: &FrontEndSpec, f_hz: f64) -> Result<f64> {
    let hb = frontend_gain(f_hz, fe)?.norm();
    Ok(-2.0 * amplitude_to_db(hb) + pair_insertion_loss_db(f_hz, 0, cable))
}

/// Least-squares fit of the per-front-end loss and a cable-coefficient scale.
///
/// Model: `loss_i = 2·x + s·c_i + 2·shape_i` where `c_i` is the nominal cable
/// loss at target `i` and `shape_i` the front-end skirt/tilt loss. When the
/// cable carries no loss at any target, `s` is unobservable and kept at 1.
pub fn calibrate_chain(
    targets: &[CalibrationTarget],
    cable: &CableSpec,
    fe: &FrontEndSpec,
) -> Result<CalibrationFit> {
    cable.validate()?;
    fe.validate()?;
    if targets.len() < 2 {
        return Err(Error::SingularFit("need at least two targets".into()));
    }
    let l0 = targets[0].length_m;
    if targets.iter().all(|t| (t.length_m - l0).abs() < 1e-12) {
        return Err(Error::SingularFit("all target lengths are equal".into()));
    }
    let mut rows = Vec::with_capacity(targets.len());
    for t in targets {
        if !(t.length_m >= 0.0) || !(t.f_if_hz > 0.0) {
            return Err(Error::Domain(format!("bad calibration target {t:?}")));
        }
        let mut c = cable.clone();
        c.length_m = t.length_m;
        let cable_db = pair_insertion_loss_db(t.f_if_hz, 0, &c);
        // unclamped skirt and tilt of one traversal
        let shape_db = -amplitude_to_db(fe.skirt(t.f_if_hz).norm()) - fe.tilt_db(t.f_if_hz);
        rows.push((cable_db, t.end_to_end_db - 2.0 * shape_db));
    }
    let n = rows.len() as f64;
    let mc = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let my = rows.iter().map(|r| r.1).sum::<f64>() / n;
    let scc: f64 = rows.iter().map(|r| (r.0 - mc).powi(2)).sum();
    let scale_c: f64 = rows.iter().map(|r| r.0 * r.0).sum::<f64>() / n;

    let (x, s) = if scale_c == 0.0 {
        (my / 2.0, 1.0)
    } else if scc <= 1e-18 * scale_c.max(1.0) {
        return Err(Error::SingularFit(
            "cable loss identical at every target".into(),
        ));
    } else {
        let scy: f64 = rows.iter().map(|r| (r.0 - mc) * (r.1 - my)).sum();
        let s = scy / scc;
        ((my - s * mc) / 2.0, s)
    };
    if x < 0.0 || s < 0.0 {
        return Err(Error::Domain(format!(
            "non-physical fit: insertion loss {x:.3} dB, cable scale {s:.3}"
        )));
    }

    let mut fit = CalibrationFit {
        insertion_loss_db: x,
        atten_scale: s,
        modeled_db: Vec::new(),
        residuals_db: Vec::new(),
    };
    let (cal_cable, cal_fe) = fit.apply(cable, fe);
    for t in targets {
        let mut c = cal_cable.clone();
        c.length_m = t.length_m;
        let m = end_to_end_loss_db(&c, &cal_fe, t.f_if_hz)?;
        fit.modeled_db.push(m);
        fit.residuals_db.push(m - t.end_to_end_db);
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::{AttenCoeffs, CableCategory};
    use crate::units::MHZ;

    fn base() -> (CableSpec, FrontEndSpec) {
        (
            CableSpec::new(CableCategory::Cat5e, 50.0, 4),
            FrontEndSpec::new(50.0 * MHZ, 450.0 * MHZ, 0.0),
        )
    }

    #[test]
    fn lab_targets_fit_within_one_db() {
        let (c, fe) = base();
        let t = [
            CalibrationTarget { length_m: 50.0, f_if_hz: 140.0 * MHZ, end_to_end_db: 50.0 },
            CalibrationTarget { length_m: 15.0, f_if_hz: 140.0 * MHZ, end_to_end_db: 42.0 },
        ];
        let fit = calibrate_chain(&t, &c, &fe).unwrap();
        assert!(fit.max_abs_residual_db() <= 1.0);
        assert!(fit.insertion_loss_db > 0.0 && fit.atten_scale > 0.0);
    }

    #[test]
    fn zero_cable_loss_splits_target_evenly() {
        let (mut c, fe) = base();
        c.atten = AttenCoeffs::ZERO;
        let f = fe.center_hz();
        let t = [
            CalibrationTarget { length_m: 50.0, f_if_hz: f, end_to_end_db: 40.0 },
            CalibrationTarget { length_m: 15.0, f_if_hz: f, end_to_end_db: 40.0 },
        ];
        let fit = calibrate_chain(&t, &c, &fe).unwrap();
        assert!((fit.insertion_loss_db - 20.0).abs() < 1e-12);
    }

    #[test]
    fn equal_lengths_are_singular() {
        let (c, fe) = base();
        let t = [
            CalibrationTarget { length_m: 50.0, f_if_hz: 140.0 * MHZ, end_to_end_db: 50.0 },
            CalibrationTarget { length_m: 50.0, f_if_hz: 140.0 * MHZ, end_to_end_db: 49.0 },
        ];
        assert!(matches!(calibrate_chain(&t, &c, &fe), Err(Error::SingularFit(_))));
        assert!(matches!(calibrate_chain(&t[..1], &c, &fe), Err(Error::SingularFit(_))));
    }

    #[test]
    fn synthetic_round_trip_recovers_constants() {
        let (c, mut fe) = base();
        fe.edge_order = 3;
        fe.equalizer_tilt_db_per_hz = 2.0 / (100.0 * MHZ);
        let (true_x, true_s) = (17.25, 0.8125);
        let truth = CalibrationFit {
            insertion_loss_db: true_x,
            atten_scale: true_s,
            modeled_db: vec![],
            residuals_db: vec![],
        };
        let (tc, tfe) = truth.apply(&c, &fe);
        let targets: Vec<_> = [(10.0, 75.0), (30.0, 175.0), (60.0, 300.0)]
            .iter()
            .map(|&(len, f)| {
                let mut cc = tc.clone();
                cc.length_m = len;
                CalibrationTarget {
                    length_m: len,
                    f_if_hz: f * MHZ,
                    end_to_end_db: end_to_end_loss_db(&cc, &tfe, f * MHZ).unwrap(),
                }
            })
            .collect();
        let fit = calibrate_chain(&targets, &c, &fe).unwrap();
        assert!(((fit.insertion_loss_db - true_x) / true_x).abs() < 1e-6);
        assert!(((fit.atten_scale - true_s) / true_s).abs() < 1e-6);
        assert!(fit.max_abs_residual_db() < 1e-9);
    }
}
