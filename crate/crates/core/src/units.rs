//! Unit conversions and physical constants.

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const MHZ: f64 = 1.0e6;

#[inline]
pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

#[inline]
pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn amplitude_to_db(a: f64) -> f64 {
    20.0 * a.log10()
}

#[inline]
pub fn power_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

/// dBm to milliwatts.
#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_power(dbm)
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    power_to_db(mw)
}

/// Total power in mW of a flat PSD (dBm/Hz) integrated over `bandwidth_hz`.
#[inline]
pub fn psd_to_mw(psd_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    dbm_to_mw(psd_dbm_hz) * bandwidth_hz
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((amplitude_to_db(db_to_amplitude(-6.0)) + 6.0).abs() < 1e-12);
        assert!((mw_to_dbm(dbm_to_mw(-50.0)) + 50.0).abs() < 1e-12);
        assert!((db_to_amplitude(-6.0) - 0.501187).abs() < 1e-6);
    }

    #[test]
    fn psd_integration() {
        // -174 dBm/Hz over 1 MHz is -114 dBm
        let p = psd_to_mw(-174.0, 1.0e6);
        assert!((mw_to_dbm(p) + 114.0).abs() < 1e-9);
    }
}
