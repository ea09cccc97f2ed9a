//! Charge-parity random telegraph signals.
//!
//! Quasiparticle tunneling events arrive as a Poisson process with rate
//! `gamma`; the charge parity is `(-1)^(event count)`. Sampled at interval
//! `dt` the parity flips between consecutive samples with probability
//! `p = (1 - exp(-2 gamma dt)) / 2` (odd number of events in `dt`), which is
//! how the generator draws the chain: exact, one uniform per sample.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::rng::{process_rng, ProcessStream};
use crate::transmon::Transition;

/// Configuration of one telegraph realization.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TelegraphConfig {
    /// True quasiparticle tunneling rate, 1/s.
    pub gamma_hz: f64,
    /// Sampling rate, Hz.
    pub fs_hz: f64,
    /// Number of parity samples.
    pub n_samples: usize,
    /// Master seed; batch item `i` uses stream `i`.
    pub seed: u64,
}

impl TelegraphConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_hz >= 0.0) {
            return Err(Error::domain("gamma must be >= 0"));
        }
        if !(self.fs_hz > 0.0) {
            return Err(Error::domain("sampling rate must be positive"));
        }
        if self.n_samples < 2 {
            return Err(Error::domain("need at least 2 samples"));
        }
        Ok(())
    }

    /// Sample interval, s.
    pub fn dt(&self) -> f64 {
        1.0 / self.fs_hz
    }

    /// Sample-to-sample parity flip probability.
    pub fn flip_probability(&self) -> f64 {
        (1.0 - (-2.0 * self.gamma_hz * self.dt()).exp()) / 2.0
    }
}

/// Why a trace was excluded from spectral estimation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscardReason {
    None,
    /// The offset charge drifted enough to shift the parity splitting past
    /// the configured threshold mid-run.
    ChargeDrift,
}

impl std::fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiscardReason::None => write!(f, "none"),
            DiscardReason::ChargeDrift => write!(f, "charge-drift"),
        }
    }
}

/// Metadata describing how ground-truth parity was mapped to measured
/// parity. Attached by the protocol layer; absent on raw telegraph traces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingMeta {
    pub transition: Transition,
    /// Parity beat the delay was calibrated against, GHz; absent when the
    /// mapping was applied standalone with an explicit delay.
    pub beat_ghz: Option<f64>,
    /// Offset-charge bias of the beat evaluation.
    pub bias_ng: f64,
    /// Ramsey delay used, s.
    pub ramsey_delay_s: f64,
    /// Probability that a measured sample equals the true parity.
    pub f_eff: f64,
    /// `2 f_eff - 1`; the telegraph PSD amplitude scales as its square.
    pub correlation: f64,
    /// Heralding removes the relaxation term from the composition.
    pub heralding: bool,
    /// Human-readable composition formula for `f_eff`.
    pub formula: String,
}

/// A uniformly sampled +-1 charge-parity time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityTrace {
    /// Measured parity samples, each +1 or -1.
    pub values: Vec<i8>,
    /// Sample interval, s.
    pub dt: f64,
    /// Master seed the trace was generated from.
    pub seed: u64,
    /// Ground-truth parity when this trace came from a simulation that
    /// applied mapping errors on top of the truth.
    pub true_values: Option<Vec<i8>>,
    /// Excluded from spectral estimation when set.
    pub discarded: bool,
    pub discard_reason: DiscardReason,
    /// Mapping-error composition; `None` for raw telegraph traces.
    pub mapping: Option<MappingMeta>,
}

impl ParityTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Trace duration, s.
    pub fn duration(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }

    /// Fraction of sample-to-sample sign changes.
    pub fn flip_fraction(&self) -> f64 {
        if self.values.len() < 2 {
            return 0.0;
        }
        let flips = self.values.windows(2).filter(|w| w[0] != w[1]).count();
        flips as f64 / (self.values.len() - 1) as f64
    }
}

pub(crate) fn telegraph_values(cfg: &TelegraphConfig, rng: &mut ChaCha8Rng) -> Vec<i8> {
    let p = cfg.flip_probability();
    let mut values = Vec::with_capacity(cfg.n_samples);
    let mut parity: i8 = if rng.gen::<f64>() < 0.5 { 1 } else { -1 };
    values.push(parity);
    for _ in 1..cfg.n_samples {
        if rng.gen::<f64>() < p {
            parity = -parity;
        }
        values.push(parity);
    }
    values
}

/// Simulate one ground-truth telegraph trace (stream 0 of the seed).
pub fn simulate_telegraph(cfg: &TelegraphConfig) -> Result<ParityTrace> {
    simulate_telegraph_indexed(cfg, 0)
}

/// Simulate the `index`-th trace of a batch under `cfg.seed`.
pub fn simulate_telegraph_indexed(cfg: &TelegraphConfig, index: u64) -> Result<ParityTrace> {
    cfg.validate()?;
    let mut rng = process_rng(cfg.seed, index, ProcessStream::Telegraph);
    Ok(ParityTrace {
        values: telegraph_values(cfg, &mut rng),
        dt: cfg.dt(),
        seed: cfg.seed,
        true_values: None,
        discarded: false,
        discard_reason: DiscardReason::None,
        mapping: None,
    })
}

/// Simulate `n_traces` independent realizations. Stream-per-index seeding
/// makes the result identical for serial and parallel execution.
pub fn simulate_telegraph_batch(
    cfg: &TelegraphConfig,
    n_traces: usize,
    exec: Exec,
) -> Result<Vec<ParityTrace>> {
    cfg.validate()?;
    let traces = map_indexed(exec, n_traces, |i| {
        simulate_telegraph_indexed(cfg, i as u64).expect("validated config")
    });
    Ok(traces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(gamma: f64, fs: f64, n: usize, seed: u64) -> TelegraphConfig {
        TelegraphConfig {
            gamma_hz: gamma,
            fs_hz: fs,
            n_samples: n,
            seed,
        }
    }

    #[test]
    fn zero_rate_is_constant() {
        let t = simulate_telegraph(&cfg(0.0, 1e3, 1000, 1)).unwrap();
        assert!(t.values.iter().all(|&v| v == t.values[0]));
        assert_eq!(t.flip_fraction(), 0.0);
    }

    #[test]
    fn saturated_rate_randomizes_parity() {
        // gamma*dt huge: flip probability -> 1/2.
        let n = 100_000;
        let t = simulate_telegraph(&cfg(1e9, 1e3, n, 2)).unwrap();
        let sigma = 0.5 / (n as f64).sqrt();
        assert!((t.flip_fraction() - 0.5).abs() < 4.0 * sigma);
    }

    #[test]
    fn flip_fraction_matches_closed_form() {
        // gamma=10/s at 1 kHz: p = (1 - exp(-0.02))/2, frozen from 50-digit
        // arithmetic.
        let c = cfg(10.0, 1e3, 1_000_000, 3);
        let p = 0.0099006633466223488896;
        assert!((c.flip_probability() - p).abs() < 1e-16);
        let t = simulate_telegraph(&c).unwrap();
        let sigma = (p * (1.0 - p) / (c.n_samples as f64 - 1.0)).sqrt();
        assert!(
            (t.flip_fraction() - p).abs() < 3.0 * sigma,
            "flip fraction {} vs p {}",
            t.flip_fraction(),
            p
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let c = cfg(25.0, 2e3, 4096, 42);
        assert_eq!(simulate_telegraph(&c).unwrap(), simulate_telegraph(&c).unwrap());
    }

    #[test]
    fn batch_traces_are_independent_and_order_invariant() {
        let c = cfg(25.0, 2e3, 2048, 7);
        let serial = simulate_telegraph_batch(&c, 8, Exec::Serial).unwrap();
        assert_ne!(serial[0].values, serial[1].values);
        #[cfg(feature = "parallel")]
        {
            let parallel = simulate_telegraph_batch(&c, 8, Exec::Parallel).unwrap();
            assert_eq!(serial, parallel);
        }
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(simulate_telegraph(&cfg(-1.0, 1e3, 100, 0)).is_err());
        assert!(simulate_telegraph(&cfg(1.0, 0.0, 100, 0)).is_err());
        assert!(simulate_telegraph(&cfg(1.0, 1e3, 1, 0)).is_err());
    }
}
