use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance on `|wᴴa - 1|` for returned MVDR weights.
pub const MVDR_CONSTRAINT_TOL: f64 = 1e-10;

const COND_LIMIT: f64 = 1e12;
const LOADING_FACTOR: f64 = 1e-6;

/// `w = R⁻¹a / (aᴴR⁻¹a)`.
///
/// `R` must be Hermitian positive semidefinite. When its condition number
/// exceeds 1e12, `1e-6·tr(R)/N` is added to the diagonal first.
pub fn mvdr_weights(r: &DMatrix<Complex64>, a: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let n = a.len();
    if r.nrows() != n || r.ncols() != n {
        return Err(Error::Domain(format!(
            "covariance is {}x{}, steering has {n} entries",
            r.nrows(),
            r.ncols()
        )));
    }
    if a.norm() == 0.0 || !a.norm().is_finite() {
        return Err(Error::Domain("steering vector must be nonzero and finite".into()));
    }
    super::check_hermitian(r)?;

    let eig = SymmetricEigen::new(r.clone()).eigenvalues;
    let lmax = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lmin = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if !(lmax > 0.0) {
        return Err(Error::Numerical("covariance has no positive eigenvalue".into()));
    }
    if lmin < -1e-9 * lmax {
        return Err(Error::Numerical(format!(
            "covariance is not positive semidefinite (min eigenvalue {lmin:.3e})"
        )));
    }
    let mut r = r.clone();
    if lmin <= 0.0 || lmax / lmin > COND_LIMIT {
        let load = LOADING_FACTOR * r.trace().re / n as f64;
        log::debug!("diagonal loading {load:.3e} (cond {:.3e})", lmax / lmin.max(0.0));
        for i in 0..n {
            r[(i, i)] += load;
        }
    }
    let chol = r
        .cholesky()
        .ok_or_else(|| Error::Numerical("covariance is singular after loading".into()))?;
    let u = chol.solve(a);
    let d = a.dotc(&u);
    if d.norm() == 0.0 || !d.norm().is_finite() {
        return Err(Error::Numerical("aᴴR⁻¹a is not usable".into()));
    }
    let w = u / d;
    let check = (w.dotc(a) - Complex64::new(1.0, 0.0)).norm();
    if check > MVDR_CONSTRAINT_TOL {
        return Err(Error::Numerical(format!("distortionless constraint off by {check:.3e}")));
    }
    Ok(w)
}

/// Matched filter normalised to the same constraint, `w = a / ‖a‖²`.
pub fn matched_filter_weights(a: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let e = a.norm_squared();
    if e == 0.0 || !e.is_finite() {
        return Err(Error::Domain("steering vector must be nonzero and finite".into()));
    }
    Ok(a / Complex64::from(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_gives_scaled_steering() {
        let a = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        let w = mvdr_weights(&DMatrix::identity(3, 3), &a).unwrap();
        assert!((w - &a / c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_closed_form() {
        let r = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(4.0, 0.0)]));
        let a = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let w = mvdr_weights(&r, &a).unwrap();
        // R⁻¹a = (1, 1/4), aᴴR⁻¹a = 5/4.
        assert!((w[0] - c(0.8, 0.0)).norm() < 1e-14);
        assert!((w[1] - c(0.2, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rank_deficient_gets_loaded() {
        let v = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let r = &v * v.adjoint();
        let w = mvdr_weights(&r, &v).unwrap();
        assert!((w.dotc(&v) - c(1.0, 0.0)).norm() < MVDR_CONSTRAINT_TOL);
    }

    #[test]
    fn rejects_bad_input() {
        let a = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let mut r = DMatrix::<Complex64>::identity(2, 2);
        r[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(mvdr_weights(&r, &a), Err(Error::Numerical(_))));
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!(mvdr_weights(&neg, &a).is_err());
        assert!(mvdr_weights(&DMatrix::identity(2, 2), &DVector::zeros(2)).is_err());
        assert!(mvdr_weights(&DMatrix::identity(3, 3), &a).is_err());
    }

    #[test]
    fn matched_filter_meets_constraint() {
        let a = DVector::from_vec(vec![c(0.3, -0.1), c(2.0, 0.5)]);
        let w = matched_filter_weights(&a).unwrap();
        assert!((w.dotc(&a) - c(1.0, 0.0)).norm() < 1e-14);
    }
}
