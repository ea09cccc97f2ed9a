//! Physical constants (CODATA-2018 exact values) and unit conversions.
//!
//! Internal convention: SI throughout the model layer (joules, kelvin,
//! rad/s, seconds). Transmon spectra are handled in GHz because the
//! Hamiltonian is linear in `E_C`, `E_J`. Interface layers convert to
//! mK / ueV / GHz at the file and report boundary.

/// Planck constant, J s (exact).
pub const PLANCK: f64 = 6.62607015e-34;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);

/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Convert an energy in micro-electronvolts to joules.
#[inline]
pub fn microev_to_joule(uev: f64) -> f64 {
    uev * 1e-6 * ELEMENTARY_CHARGE
}

/// Convert an energy in joules to micro-electronvolts.
#[inline]
pub fn joule_to_microev(j: f64) -> f64 {
    j / (1e-6 * ELEMENTARY_CHARGE)
}

/// Convert a temperature in millikelvin to kelvin.
#[inline]
pub fn mk_to_kelvin(mk: f64) -> f64 {
    mk * 1e-3
}

/// Convert a temperature in kelvin to millikelvin.
#[inline]
pub fn kelvin_to_mk(k: f64) -> f64 {
    k * 1e3
}

/// Angular frequency (rad/s) of a transition frequency given in GHz.
#[inline]
pub fn ghz_to_angular(f_ghz: f64) -> f64 {
    2.0 * std::f64::consts::PI * f_ghz * 1e9
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hbar_value() {
        assert!((HBAR - 1.054571817e-34).abs() / HBAR < 1e-9);
    }

    #[test]
    fn microev_round_trip() {
        let e = microev_to_joule(190.0);
        assert!((e - 3.0441356046e-23).abs() / e < 1e-9);
        assert!((joule_to_microev(e) - 190.0).abs() < 1e-12);
    }
}
