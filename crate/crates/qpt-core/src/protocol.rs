//! Ramsey charge-parity mapping protocol simulation.
//!
//! A protocol run layers three random processes on a ground-truth telegraph
//! trace: offset-charge drift (Poisson-timed jumps to a uniform new offset;
//! a jump that moves the parity splitting past the configured threshold
//! flags the whole block discarded), the parity-to-state mapping with its
//! finite fidelity, and state readout errors. Relaxation during the Ramsey
//! delay enters as a parity-independent loss of mapping correlation unless
//! heralding is enabled, in which case affected samples are assumed
//! post-selected away.
//!
//! Each measured sample equals the true parity with probability
//! `f_eff = (1 + C) / 2`,
//! `C = (2 map_fidelity - 1) (1 - 2 readout_flip) exp(-delay/T1)`
//! (the exponential factor is dropped when heralding). Independent error
//! channels compose multiplicatively in `C`; the telegraph PSD amplitude
//! scales as `C^2`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::optimize::{fit, GaussNewtonOptions, LeastSquaresModel};
use crate::rng::{process_rng, ProcessStream};
use crate::telegraph::{
    telegraph_values, DiscardReason, MappingMeta, ParityTrace, TelegraphConfig,
};
use crate::transmon::{parity_beat, DispersionOptions, QubitParams, Transition};

/// Configuration of the parity-to-state mapping layer.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MappingConfig {
    /// Which transition the Ramsey sequence runs on.
    pub transition: Transition,
    /// Probability of a correct parity-to-state mapping.
    pub map_fidelity: f64,
    /// Probability of a state readout error.
    pub readout_flip: f64,
    /// Relaxation time during the sequence, s. `f64::INFINITY` disables
    /// relaxation loss.
    pub t1_s: f64,
    /// Ramsey delay, s. `None` calibrates `1/(4 beat)` from the qubit.
    pub ramsey_delay_s: Option<f64>,
    /// Offset-charge jump rate, 1/s. Zero disables drift.
    pub drift_rate_hz: f64,
    /// Splitting change that triggers a block discard, GHz.
    pub drift_threshold_ghz: f64,
    /// Assume pre/post measurements post-select relaxation events away.
    pub heralding: bool,
    /// Longest acceptable calibrated delay, s; beats too small to reach
    /// pi/4 phase within this bound fail calibration.
    pub max_delay_s: f64,
    /// Offset-charge bias the beat is evaluated at.
    pub bias_ng: f64,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig {
            transition: Transition::ZeroOne,
            map_fidelity: 0.9,
            readout_flip: 0.0,
            t1_s: 100e-6,
            ramsey_delay_s: None,
            drift_rate_hz: 0.0,
            drift_threshold_ghz: 1e-5,
            heralding: false,
            max_delay_s: 100e-6,
            bias_ng: 0.0,
        }
    }
}

impl MappingConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("map_fidelity", self.map_fidelity),
            ("readout_flip", self.readout_flip),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("{name} must lie in [0, 1]")));
            }
        }
        if !(self.t1_s > 0.0) {
            return Err(Error::domain("t1 must be positive"));
        }
        if self.drift_rate_hz < 0.0 || self.drift_threshold_ghz < 0.0 {
            return Err(Error::domain("drift parameters must be non-negative"));
        }
        if !(self.max_delay_s > 0.0) {
            return Err(Error::domain("max_delay must be positive"));
        }
        Ok(())
    }

    /// Measured-equals-true probability for a given delay.
    pub fn effective_fidelity(&self, delay_s: f64) -> f64 {
        (1.0 + self.correlation(delay_s)) / 2.0
    }

    /// Mapping correlation `C`; the PSD amplitude scales as `C^2`.
    pub fn correlation(&self, delay_s: f64) -> f64 {
        let relax = if self.heralding {
            1.0
        } else {
            (-delay_s / self.t1_s).exp()
        };
        (2.0 * self.map_fidelity - 1.0) * (1.0 - 2.0 * self.readout_flip) * relax
    }

    fn formula(&self) -> String {
        if self.heralding {
            "f_eff = (1 + (2*map_fidelity - 1)*(1 - 2*readout_flip))/2 [heralded]".to_string()
        } else {
            "f_eff = (1 + (2*map_fidelity - 1)*(1 - 2*readout_flip)*exp(-ramsey_delay/t1))/2"
                .to_string()
        }
    }
}

/// Ramsey delay giving +-pi/4 parity phase for a beat in Hz: `1/(4 beat)`.
pub fn delay_for_beat(beat_hz: f64) -> Result<f64> {
    if !(beat_hz > 0.0) {
        return Err(Error::Calibration(format!(
            "parity beat {beat_hz} Hz is not positive"
        )));
    }
    Ok(1.0 / (4.0 * beat_hz))
}

/// Calibrated Ramsey delay for a qubit and transition, s.
pub fn calibrate_delay(qubit: &QubitParams, transition: Transition) -> Result<f64> {
    delay_for_beat(qubit.beat_ghz(transition)? * 1e9)
}

/// Map ground-truth parity to measured parity with the configured errors.
///
/// The input trace's `values` are treated as the truth; the output carries
/// them in `true_values`. Requires an explicit `ramsey_delay_s`.
pub fn apply_cp_mapping(
    trace: &ParityTrace,
    cfg: &MappingConfig,
    seed: u64,
) -> Result<ParityTrace> {
    let mut rng = process_rng(seed, 0, ProcessStream::Mapping);
    apply_cp_mapping_with_rng(trace, cfg, None, &mut rng)
}

fn apply_cp_mapping_with_rng(
    trace: &ParityTrace,
    cfg: &MappingConfig,
    beat_ghz: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<ParityTrace> {
    cfg.validate()?;
    let delay = cfg
        .ramsey_delay_s
        .ok_or_else(|| Error::domain("apply_cp_mapping requires an explicit ramsey_delay_s"))?;
    let f_eff = cfg.effective_fidelity(delay);
    let measured: Vec<i8> = trace
        .values
        .iter()
        .map(|&v| if rng.gen::<f64>() < f_eff { v } else { -v })
        .collect();
    Ok(ParityTrace {
        values: measured,
        dt: trace.dt,
        seed: trace.seed,
        true_values: Some(trace.values.clone()),
        discarded: trace.discarded,
        discard_reason: trace.discard_reason,
        mapping: Some(MappingMeta {
            transition: cfg.transition,
            beat_ghz,
            bias_ng: cfg.bias_ng,
            ramsey_delay_s: delay,
            f_eff,
            correlation: cfg.correlation(delay),
            heralding: cfg.heralding,
            formula: cfg.formula(),
        }),
    })
}

/// End-to-end protocol simulation: telegraph truth, drift injection, and
/// mapping errors for batch item `index`.
pub fn simulate_protocol_run_indexed(
    qubit: &QubitParams,
    tele: &TelegraphConfig,
    map: &MappingConfig,
    index: u64,
) -> Result<ParityTrace> {
    tele.validate()?;
    map.validate()?;

    let opts = DispersionOptions {
        bias_ng: map.bias_ng,
        ..DispersionOptions::default()
    };
    let beat_ghz = parity_beat(qubit.ec_ghz, qubit.ej_ghz, map.transition, &opts)?;
    let delay = match map.ramsey_delay_s {
        Some(d) => d,
        None => {
            let beat_hz = beat_ghz * 1e9;
            if beat_hz * map.max_delay_s < 0.25 {
                return Err(Error::Calibration(format!(
                    "beat {beat_hz:.3} Hz below resolvable floor: pi/4 phase needs \
                     {:.3e} s > max_delay {:.3e} s",
                    1.0 / (4.0 * beat_hz.max(f64::MIN_POSITIVE)),
                    map.max_delay_s
                )));
            }
            delay_for_beat(beat_hz)?
        }
    };

    let mut truth_rng = process_rng(tele.seed, index, ProcessStream::Telegraph);
    let truth = telegraph_values(tele, &mut truth_rng);

    // Drift: Poisson-timed jumps to a uniform new offset charge; compare the
    // splitting after each jump against the splitting at the working bias.
    let mut discarded = false;
    if map.drift_rate_hz > 0.0 {
        let mut drift_rng = process_rng(tele.seed, index, ProcessStream::Drift);
        let duration = tele.n_samples as f64 / tele.fs_hz;
        let mut t = 0.0;
        loop {
            let u: f64 = drift_rng.gen();
            t += -u.ln() / map.drift_rate_hz;
            if t >= duration {
                break;
            }
            let new_ng: f64 = drift_rng.gen();
            let drifted = parity_beat(
                qubit.ec_ghz,
                qubit.ej_ghz,
                map.transition,
                &DispersionOptions {
                    bias_ng: new_ng,
                    ..opts
                },
            )?;
            if (drifted - beat_ghz).abs() > map.drift_threshold_ghz {
                discarded = true;
                break;
            }
        }
    }

    let base = ParityTrace {
        values: truth,
        dt: tele.dt(),
        seed: tele.seed,
        true_values: None,
        discarded,
        discard_reason: if discarded {
            DiscardReason::ChargeDrift
        } else {
            DiscardReason::None
        },
        mapping: None,
    };
    let cfg = MappingConfig {
        ramsey_delay_s: Some(delay),
        ..map.clone()
    };
    let mut map_rng = process_rng(tele.seed, index, ProcessStream::Mapping);
    apply_cp_mapping_with_rng(&base, &cfg, Some(beat_ghz), &mut map_rng)
}

/// Single protocol run (batch index 0).
pub fn simulate_protocol_run(
    qubit: &QubitParams,
    tele: &TelegraphConfig,
    map: &MappingConfig,
) -> Result<ParityTrace> {
    simulate_protocol_run_indexed(qubit, tele, map, 0)
}

/// Independent protocol runs; identical output for any execution strategy.
pub fn simulate_protocol_batch(
    qubit: &QubitParams,
    tele: &TelegraphConfig,
    map: &MappingConfig,
    n_traces: usize,
    exec: Exec,
) -> Result<Vec<ParityTrace>> {
    // Validate once up front so worker closures cannot fail.
    simulate_protocol_run_indexed(qubit, tele, map, 0)?;
    Ok(map_indexed(exec, n_traces, |i| {
        simulate_protocol_run_indexed(qubit, tele, map, i as u64).expect("validated inputs")
    }))
}

/// Configuration of the carrier-calibration fringe simulation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CarrierCalConfig {
    /// True carrier offset from the parity-split midpoint, Hz (injected).
    pub offset_hz: f64,
    /// Effective frequency added by the linearly ramped second-pulse phase,
    /// Hz. Moves both tones away from DC so they are resolvable.
    pub phase_ramp_hz: f64,
    pub n_points: usize,
    /// Fringe sample spacing, s.
    pub t_step_s: f64,
    /// Gaussian readout noise on the fringe.
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Result of the two-tone carrier calibration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CarrierCalibration {
    /// Estimated parity beat, Hz.
    pub beat_hz: f64,
    /// Estimated carrier offset from the midpoint, Hz.
    pub carrier_offset_hz: f64,
}

/// Two equal cosines at `f_plus`, `f_minus` with common amplitude.
struct TwoToneModel {
    times: Vec<f64>,
    data: Vec<f64>,
}

impl LeastSquaresModel for TwoToneModel {
    fn n_params(&self) -> usize {
        3
    }
    fn n_residuals(&self) -> usize {
        self.times.len()
    }
    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let (a, fp, fm) = (p[0], p[1], p[2]);
        for (i, (&t, &y)) in self.times.iter().zip(&self.data).enumerate() {
            let tau = 2.0 * std::f64::consts::PI * t;
            out[i] = a * 0.5 * ((fp * tau).cos() + (fm * tau).cos()) - y;
        }
    }
    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        let (a, fp, fm) = (p[0], p[1], p[2]);
        for (i, &t) in self.times.iter().enumerate() {
            let tau = 2.0 * std::f64::consts::PI * t;
            out[i * 3] = 0.5 * ((fp * tau).cos() + (fm * tau).cos());
            out[i * 3 + 1] = -a * 0.5 * tau * (fp * tau).sin();
            out[i * 3 + 2] = -a * 0.5 * tau * (fm * tau).sin();
        }
    }
}

/// Simulate the calibration fringe for a known beat and fit both tones.
pub fn calibrate_carrier_with_beat(
    beat_hz: f64,
    cfg: &CarrierCalConfig,
) -> Result<CarrierCalibration> {
    if !(beat_hz > 0.0) {
        return Err(Error::Calibration("beat must be positive".into()));
    }
    if cfg.n_points < 16 || cfg.t_step_s <= 0.0 {
        return Err(Error::domain("need n_points >= 16 and positive t_step"));
    }
    let span = cfg.n_points as f64 * cfg.t_step_s;
    if span * beat_hz <= 4.0 {
        return Err(Error::Ambiguity(format!(
            "fringe spans {:.2} beat periods; need > 4 to resolve both tones",
            span * beat_hz
        )));
    }
    let f_plus = cfg.phase_ramp_hz + cfg.offset_hz + beat_hz / 2.0;
    let f_minus = cfg.phase_ramp_hz + cfg.offset_hz - beat_hz / 2.0;
    let mut rng = process_rng(cfg.seed, 0, ProcessStream::CarrierNoise);
    let times: Vec<f64> = (0..cfg.n_points).map(|k| k as f64 * cfg.t_step_s).collect();
    let data: Vec<f64> = times
        .iter()
        .map(|&t| {
            let tau = 2.0 * std::f64::consts::PI * t;
            let clean = 0.5 * ((f_plus * tau).cos() + (f_minus * tau).cos());
            clean + cfg.noise_sigma * gaussian(&mut rng)
        })
        .collect();

    let (init_p, init_m) = fringe_peaks(&times, &data, cfg.phase_ramp_hz, beat_hz);
    let model = TwoToneModel { times, data };
    let report = fit(
        &model,
        &[1.0, init_p, init_m],
        &GaussNewtonOptions::default(),
    )?;
    let (fp, fm) = (report.params[1], report.params[2]);
    let (hi, lo) = if fp >= fm { (fp, fm) } else { (fm, fp) };
    Ok(CarrierCalibration {
        beat_hz: hi - lo,
        carrier_offset_hz: (hi + lo) / 2.0 - cfg.phase_ramp_hz,
    })
}

/// Calibrate against the qubit's parity beat for the given transition.
pub fn calibrate_carrier(
    qubit: &QubitParams,
    transition: Transition,
    cfg: &CarrierCalConfig,
) -> Result<CarrierCalibration> {
    calibrate_carrier_with_beat(qubit.beat_ghz(transition)? * 1e9, cfg)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per call keeps the stream layout simple.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Coarse two-tone initial guess from the fringe periodogram.
fn fringe_peaks(times: &[f64], data: &[f64], ramp_hz: f64, beat_hint_hz: f64) -> (f64, f64) {
    let span = times.last().copied().unwrap_or(1.0);
    let f_max = ramp_hz.abs() + beat_hint_hz * 2.0;
    let n_grid = 512;
    let mut best = (0.0, 0.0_f64);
    for k in 1..n_grid {
        let f = f_max * k as f64 / n_grid as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (&t, &y) in times.iter().zip(data) {
            let phase = 2.0 * std::f64::consts::PI * f * t;
            re += y * phase.cos();
            im += y * phase.sin();
        }
        let mag = re * re + im * im;
        if mag > best.1 {
            best = (f, mag);
        }
    }
    let centre = best.0;
    // Second tone: strongest peak at least one resolution bin away.
    let min_sep = 1.0 / span;
    let mut second = (centre + beat_hint_hz, 0.0_f64);
    for k in 1..n_grid {
        let f = f_max * k as f64 / n_grid as f64;
        if (f - centre).abs() < min_sep {
            continue;
        }
        let (mut re, mut im) = (0.0, 0.0);
        for (&t, &y) in times.iter().zip(data) {
            let phase = 2.0 * std::f64::consts::PI * f * t;
            re += y * phase.cos();
            im += y * phase.sin();
        }
        let mag = re * re + im * im;
        if mag > second.1 {
            second = (f, mag);
        }
    }
    (centre.max(second.0), centre.min(second.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telegraph::simulate_telegraph;

    fn tele(gamma: f64, n: usize, seed: u64) -> TelegraphConfig {
        TelegraphConfig {
            gamma_hz: gamma,
            fs_hz: 2e3,
            n_samples: n,
            seed,
        }
    }

    #[test]
    fn ideal_mapping_is_identity() {
        let truth = simulate_telegraph(&tele(20.0, 4096, 1)).unwrap();
        let cfg = MappingConfig {
            map_fidelity: 1.0,
            readout_flip: 0.0,
            t1_s: f64::INFINITY,
            ramsey_delay_s: Some(1e-6),
            ..MappingConfig::default()
        };
        let mapped = apply_cp_mapping(&truth, &cfg, 7).unwrap();
        assert_eq!(mapped.values, truth.values);
        assert_eq!(mapped.true_values.as_deref(), Some(truth.values.as_slice()));
        let meta = mapped.mapping.unwrap();
        assert_eq!(meta.f_eff, 1.0);
    }

    #[test]
    fn half_fidelity_decorrelates() {
        let truth = simulate_telegraph(&tele(5.0, 200_000, 2)).unwrap();
        let cfg = MappingConfig {
            map_fidelity: 0.5,
            ramsey_delay_s: Some(1e-6),
            ..MappingConfig::default()
        };
        let mapped = apply_cp_mapping(&truth, &cfg, 3).unwrap();
        let n = truth.values.len() as f64;
        let corr: f64 = truth
            .values
            .iter()
            .zip(&mapped.values)
            .map(|(&a, &b)| (a as f64) * (b as f64))
            .sum::<f64>()
            / n;
        assert!(corr.abs() < 4.0 / n.sqrt(), "corr {corr}");
    }

    #[test]
    fn delay_calibration_examples() {
        assert!((delay_for_beat(1e6).unwrap() - 250e-9).abs() < 1e-18);
        let d1 = delay_for_beat(1e6).unwrap();
        let d2 = delay_for_beat(2e6).unwrap();
        assert!((d1 / d2 - 2.0).abs() < 1e-12);
        assert!(delay_for_beat(0.0).is_err());
        assert!(delay_for_beat(-5.0).is_err());
    }

    #[test]
    fn delay_ratio_tracks_beat_ratio() {
        let q = QubitParams::synthetic(); // E_J/E_C = 50
        let d01 = calibrate_delay(&q, Transition::ZeroOne).unwrap();
        let d12 = calibrate_delay(&q, Transition::OneTwo).unwrap();
        assert!(d01 / d12 > 10.0, "d01/d12 = {}", d01 / d12);
    }

    #[test]
    fn one_two_mapping_has_higher_fidelity() {
        // Shorter 1-2 delay means less relaxation loss.
        let q = QubitParams::synthetic();
        let t = tele(10.0, 2048, 5);
        let base = MappingConfig {
            t1_s: 50e-6,
            ..MappingConfig::default()
        };
        let run01 = simulate_protocol_run(&q, &t, &base).unwrap();
        let run12 = simulate_protocol_run(
            &q,
            &t,
            &MappingConfig {
                transition: Transition::OneTwo,
                ..base
            },
        )
        .unwrap();
        let f01 = run01.mapping.unwrap().f_eff;
        let f12 = run12.mapping.unwrap().f_eff;
        assert!(f12 > f01, "f12 {f12} <= f01 {f01}");
    }

    #[test]
    fn heralding_removes_relaxation_loss() {
        let cfg = MappingConfig {
            t1_s: 50e-6,
            heralding: true,
            ..MappingConfig::default()
        };
        assert_eq!(cfg.effective_fidelity(25e-6), cfg.effective_fidelity(0.0));
        let plain = MappingConfig {
            heralding: false,
            ..cfg
        };
        assert!(plain.effective_fidelity(25e-6) < cfg.effective_fidelity(25e-6));
    }

    #[test]
    fn no_drift_never_discards() {
        let q = QubitParams::synthetic();
        for seed in 0..4 {
            let run = simulate_protocol_run(&q, &tele(10.0, 2000, seed), &MappingConfig::default())
                .unwrap();
            assert!(!run.discarded);
            assert_eq!(run.discard_reason, DiscardReason::None);
        }
    }

    #[test]
    fn heavy_drift_discards_every_block() {
        let q = QubitParams::synthetic();
        let map = MappingConfig {
            drift_rate_hz: 50.0,
            drift_threshold_ghz: 1e-9,
            ..MappingConfig::default()
        };
        // 1 s blocks; with ~50 jumps per block and a threshold far below the
        // typical splitting change, every block is hit.
        let runs =
            simulate_protocol_batch(&q, &tele(10.0, 2000, 3), &map, 8, Exec::Serial).unwrap();
        assert!(runs.iter().all(|r| r.discarded));
        assert!(runs
            .iter()
            .all(|r| r.discard_reason == DiscardReason::ChargeDrift));
    }

    #[test]
    fn unresolvable_beat_fails_calibration() {
        // Tiny max_delay forces the resolvable-floor error for the small
        // 0-1 beat at E_J/E_C = 50 (~12 kHz needs ~21 us).
        let q = QubitParams::synthetic();
        let map = MappingConfig {
            max_delay_s: 1e-6,
            ..MappingConfig::default()
        };
        let err = simulate_protocol_run(&q, &tele(10.0, 2000, 1), &map).unwrap_err();
        assert!(matches!(err, Error::Calibration(_)), "{err:?}");
    }

    #[test]
    fn protocol_is_deterministic_and_order_invariant() {
        let q = QubitParams::synthetic();
        let t = tele(10.0, 2048, 11);
        let m = MappingConfig::default();
        let a = simulate_protocol_batch(&q, &t, &m, 4, Exec::Serial).unwrap();
        let b = simulate_protocol_batch(&q, &t, &m, 4, Exec::Serial).unwrap();
        assert_eq!(a, b);
        #[cfg(feature = "parallel")]
        {
            let c = simulate_protocol_batch(&q, &t, &m, 4, Exec::Parallel).unwrap();
            assert_eq!(a, c);
        }
    }

    #[test]
    fn carrier_calibration_noiseless_is_exact() {
        let cfg = CarrierCalConfig {
            offset_hz: 0.0,
            phase_ramp_hz: 2e6,
            n_points: 256,
            t_step_s: 5e-8,
            noise_sigma: 0.0,
            seed: 0,
        };
        let cal = calibrate_carrier_with_beat(1e6, &cfg).unwrap();
        assert!((cal.beat_hz - 1e6).abs() / 1e6 < 1e-6, "beat {}", cal.beat_hz);
        assert!(cal.carrier_offset_hz.abs() / 1e6 < 1e-6);
    }

    #[test]
    fn carrier_calibration_with_noise_recovers_beat() {
        for seed in 0..5 {
            let cfg = CarrierCalConfig {
                offset_hz: 0.0,
                phase_ramp_hz: 2e6,
                n_points: 512,
                t_step_s: 5e-8,
                noise_sigma: 0.1,
                seed,
            };
            let cal = calibrate_carrier_with_beat(1e6, &cfg).unwrap();
            assert!(
                (cal.beat_hz - 1e6).abs() / 1e6 < 0.01,
                "seed {seed}: beat {}",
                cal.beat_hz
            );
        }
    }

    #[test]
    fn carrier_calibration_recovers_offset() {
        for seed in 0..5 {
            let cfg = CarrierCalConfig {
                offset_hz: 0.3e6,
                phase_ramp_hz: 2e6,
                n_points: 512,
                t_step_s: 5e-8,
                noise_sigma: 0.1,
                seed: 100 + seed,
            };
            let cal = calibrate_carrier_with_beat(1e6, &cfg).unwrap();
            assert!(
                (cal.carrier_offset_hz - 0.3e6).abs() / 1e6 < 0.01,
                "seed {seed}: offset {}",
                cal.carrier_offset_hz
            );
        }
    }

    #[test]
    fn unresolved_tones_are_ambiguous() {
        let cfg = CarrierCalConfig {
            offset_hz: 0.0,
            phase_ramp_hz: 2e6,
            n_points: 32,
            t_step_s: 5e-8,
            noise_sigma: 0.0,
            seed: 0,
        };
        // 32 * 50 ns * 1 MHz = 1.6 beat periods: unresolvable.
        assert!(matches!(
            calibrate_carrier_with_beat(1e6, &cfg),
            Err(Error::Ambiguity(_))
        ));
    }

    #[test]
    fn sign_flip_leaves_psd_unchanged() {
        use crate::spectral::{estimate_psd, Window};
        let truth = simulate_telegraph(&tele(15.0, 8192, 21)).unwrap();
        let mut flipped = truth.clone();
        for v in &mut flipped.values {
            *v = -*v;
        }
        let a = estimate_psd(&truth, 1024, Window::Rectangular).unwrap();
        let b = estimate_psd(&flipped, 1024, Window::Rectangular).unwrap();
        assert_eq!(a.power, b.power);
    }
}
