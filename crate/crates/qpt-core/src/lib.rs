//! Desk-scale simulation and analysis of quasiparticle tunneling in
//! transmon qubits.
//!
//! The crate covers the full measurement-and-modeling chain:
//!
//! * [`transmon`] — Cooper-pair-box spectra, charge dispersion, and the
//!   parity beat frequencies the detection protocol rides on.
//! * [`telegraph`] / [`protocol`] — charge-parity random telegraph signals
//!   and the Ramsey parity-mapping protocol (0-1 and 1-2 variants, carrier
//!   calibration, drift discard).
//! * [`spectral`] — Welch PSD estimation and Lorentzian knee fits that turn
//!   parity traces into tunneling rates.
//! * [`model`] / [`sweep`] — the thermal quasiparticle-tunneling model with
//!   optional subgap channels, temperature-sweep fits for the gap
//!   parameters, sweep classification, and bootstrap uncertainties.
//! * [`cohort`] / [`synth`] — population statistics across devices and the
//!   synthetic fixture generator used by the round-trip test suites.
//! * [`formats`] — line-oriented text and CSV/JSON file formats.
//!
//! Batch operations are data-parallel over independent RNG streams (one per
//! work item), so results are identical under the `parallel` feature's
//! rayon execution and the sequential fallback.

pub mod cohort;
pub mod constants;
pub mod error;
pub mod exec;
pub mod formats;
pub mod model;
pub mod optimize;
pub mod protocol;
pub mod rng;
pub mod special;
pub mod spectral;
pub mod sweep;
pub mod synth;
pub mod telegraph;
pub mod transmon;

pub use error::{Error, Result};
pub use exec::Exec;

pub use cohort::{
    analyze_cohort, design_medians, fit_area_trend, fit_qpt_vs_admittance, gap_histograms,
    quality_factor, AnalyzeOptions, CohortReport, DesignName, DeviceRecord, Material,
    PaddleStyle, QubitDesign, TrendForm,
};
pub use model::{
    channel_amplitude, gamma_thermal_single, gamma_total, re_admittance,
    rn_from_ambegaokar_baratoff, SubgapChannel, TwoGapModelParams,
};
pub use protocol::{
    apply_cp_mapping, calibrate_carrier, calibrate_delay, simulate_protocol_batch,
    simulate_protocol_run, CarrierCalConfig, MappingConfig,
};
pub use spectral::{
    average_psds, estimate_psd, fit_lorentzian, fit_lorentzian_with, LorentzianFit,
    LorentzianFitOptions, PsdEstimate, Window,
};
pub use sweep::{
    bootstrap_uncertainty, classify_sweep, fit_temperature_sweep, synthesize_sweep,
    BootstrapConfig, Classification, ClassifyOptions, ModelKind, SweepFitResult, SweepPoint,
    TemperatureSweep,
};
pub use synth::{generate_cohort, CohortSpec, SyntheticCohort};
pub use telegraph::{
    simulate_telegraph, simulate_telegraph_batch, DiscardReason, ParityTrace, TelegraphConfig,
};
pub use transmon::{
    charge_dispersion, cpb_spectrum, parity_beat, transition_frequency, ChargeDispersion,
    DispersionOptions, QubitParams, Transition,
};
