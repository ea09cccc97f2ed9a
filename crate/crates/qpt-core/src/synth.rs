//! Synthetic cohort fixtures.
//!
//! Generates device tables and per-device temperature sweeps that
//! statistically mimic the measured population: base-temperature QPT rates
//! linear in the per-design simulated admittance with style-dependent
//! slopes, admittance exponential in paddle area (normalized to design G),
//! gap truth drawn around the Al literature value, and a configurable
//! fraction of anomalous (subgap-channel) devices. Ground truth is emitted
//! alongside so round-trip tests can score the analysis pipeline.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohort::{design, DesignName, DeviceRecord, Material, PaddleStyle};
use crate::constants::{ghz_to_angular, microev_to_joule, mk_to_kelvin, BOLTZMANN, HBAR};
use crate::error::Result;
use crate::model::{SubgapChannel, TwoGapModelParams};
use crate::rng::stream_rng;
use crate::sweep::{linspace_mk, SweepPoint, TemperatureSweep};

/// Independent gap value from cryogenic I-V measurements, ueV; shipped as a
/// labeled reference row in the ground-truth sidecar.
pub const IV_REFERENCE_GAP_UEV: f64 = 185.0;
/// Vertical-axis scale difference between the NbN and Al admittance plots;
/// dataset metadata, never behavior.
pub const NBN_AL_AXIS_FACTOR: f64 = 2.8;

/// How many devices of which designs to generate for one material.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaterialPlan {
    pub material: Material,
    pub designs: Vec<DesignName>,
    pub per_design: usize,
    /// Emit a temperature sweep per device.
    pub sweeps: bool,
    /// Emit the simulated normalized admittance column.
    pub with_re_y: bool,
}

/// Generator parameters for a synthetic cohort.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CohortSpec {
    pub materials: Vec<MaterialPlan>,
    /// Majority-gap truth distribution, ueV.
    pub delta0_uev_mean: f64,
    pub delta0_uev_sigma: f64,
    /// Subgap truth: `delta1 = ratio * delta0` with log-normal scatter.
    pub delta1_ratio: f64,
    pub delta1_log_sigma: f64,
    /// Fraction of sweep devices carrying a subgap channel.
    pub anomalous_fraction: f64,
    /// Relative multiplicative noise on sweep rates.
    pub sweep_noise_rel: f64,
    pub sweep_t_min_mk: f64,
    pub sweep_t_max_mk: f64,
    pub sweep_n_points: usize,
    /// Base rate vs admittance: `intercept + slope * re_y`, per style.
    pub qpt_intercept_hz: f64,
    pub qpt_slope_tapered: f64,
    pub qpt_slope_non_tapered: f64,
    /// Log-scatter of base rates around the style line.
    pub qpt_log_sigma: f64,
    pub t1_us_mean: f64,
    pub t1_us_sigma: f64,
    pub f01_ghz_mean: f64,
    pub f01_ghz_sigma: f64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        let sweep_designs = vec![DesignName::D, DesignName::E, DesignName::F, DesignName::G];
        CohortSpec {
            materials: vec![
                MaterialPlan {
                    material: Material::Nb,
                    designs: DesignName::ALL.to_vec(),
                    per_design: 6,
                    sweeps: true,
                    with_re_y: false,
                },
                MaterialPlan {
                    material: Material::NbN,
                    designs: sweep_designs.clone(),
                    per_design: 8,
                    sweeps: true,
                    with_re_y: true,
                },
                MaterialPlan {
                    material: Material::Al,
                    designs: sweep_designs,
                    per_design: 8,
                    sweeps: true,
                    with_re_y: true,
                },
                MaterialPlan {
                    material: Material::Ta,
                    designs: vec![DesignName::B, DesignName::C, DesignName::E],
                    per_design: 4,
                    sweeps: true,
                    with_re_y: false,
                },
            ],
            delta0_uev_mean: 188.0,
            delta0_uev_sigma: 2.0,
            delta1_ratio: 0.1,
            delta1_log_sigma: 0.25,
            anomalous_fraction: 0.5,
            sweep_noise_rel: 0.05,
            sweep_t_min_mk: 20.0,
            sweep_t_max_mk: 250.0,
            sweep_n_points: 12,
            qpt_intercept_hz: 1.0,
            qpt_slope_tapered: 15.0,
            qpt_slope_non_tapered: 45.0,
            qpt_log_sigma: 0.35,
            t1_us_mean: 100.0,
            t1_us_sigma: 12.0,
            f01_ghz_mean: 5.0,
            f01_ghz_sigma: 0.2,
        }
    }
}

/// Ground truth for one generated device.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeviceTruth {
    pub gamma_ne_hz: f64,
    pub delta0_uev: f64,
    pub delta1_uev: Option<f64>,
    pub amplitude: Option<f64>,
    pub anomalous: bool,
}

/// Sidecar emitted next to the fixture files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub iv_reference_gap_uev: f64,
    pub nbn_al_axis_factor: f64,
    pub per_device: BTreeMap<String, DeviceTruth>,
}

/// A generated cohort: records, sweeps keyed by device id, and truth.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SyntheticCohort {
    pub devices: Vec<DeviceRecord>,
    pub sweeps: BTreeMap<String, TemperatureSweep>,
    pub truth: GroundTruth,
}

/// Normalized admittance of a design: exponential in paddle area, equal to
/// 1 for design G and 1/20 for design A.
pub fn re_y_of_design(name: DesignName) -> f64 {
    let area_a = design(DesignName::A).paddle_area_um2();
    let area_g = design(DesignName::G).paddle_area_um2();
    let k = (20.0_f64).ln() / (area_g - area_a);
    (k * (design(name).paddle_area_um2() - area_g)).exp()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Generate a deterministic synthetic cohort. Device `i` draws from stream
/// `2i` of the seed and its sweep noise from stream `2i + 1`, so the output
/// is byte-stable regardless of iteration strategy.
pub fn generate_cohort(spec: &CohortSpec, seed: u64) -> Result<SyntheticCohort> {
    let mut devices = Vec::new();
    let mut sweeps = BTreeMap::new();
    let mut per_device = BTreeMap::new();

    let t_grid = linspace_mk(spec.sweep_t_min_mk, spec.sweep_t_max_mk, spec.sweep_n_points);
    let mut index: u64 = 0;
    for plan in &spec.materials {
        for &design_name in &plan.designs {
            let d = design(design_name);
            let re_y = re_y_of_design(design_name);
            for k in 0..plan.per_design {
                let mut rng = stream_rng(seed, 2 * index);
                let device_id = format!("{}-{}-{:03}", plan.material, design_name, k);

                let slope = match d.style {
                    PaddleStyle::Tapered => spec.qpt_slope_tapered,
                    PaddleStyle::NonTapered => spec.qpt_slope_non_tapered,
                };
                let base_rate = (spec.qpt_intercept_hz + slope * re_y)
                    * (spec.qpt_log_sigma * gaussian(&mut rng)).exp();
                // Keep base-temperature switching times inside the observed
                // window [1 ms, 1.5 s].
                let qpt_rate = base_rate.clamp(0.7, 900.0);

                let t1_us = (spec.t1_us_mean + spec.t1_us_sigma * gaussian(&mut rng))
                    .clamp(spec.t1_us_mean * 0.7, spec.t1_us_mean * 1.4);
                let f01_ghz = (spec.f01_ghz_mean + spec.f01_ghz_sigma * gaussian(&mut rng))
                    .clamp(spec.f01_ghz_mean - 0.5, spec.f01_ghz_mean + 0.5);

                let delta0_uev = (spec.delta0_uev_mean
                    + spec.delta0_uev_sigma * gaussian(&mut rng))
                .clamp(spec.delta0_uev_mean - 6.0, spec.delta0_uev_mean + 6.0);

                let anomalous = plan.sweeps && rng.gen::<f64>() < spec.anomalous_fraction;
                let omega = ghz_to_angular(f01_ghz);
                let (delta1_uev, amplitude) = if anomalous {
                    let d1 = (spec.delta1_ratio
                        * delta0_uev
                        * (spec.delta1_log_sigma * gaussian(&mut rng)).exp())
                    .clamp(6.0, 29.0);
                    // Amplitude sized so the subgap term reaches u x the
                    // background at 50 mK, u log-uniform in [3, 30].
                    let u = 3.0 * (10.0_f64).powf(rng.gen::<f64>());
                    let t50 = mk_to_kelvin(50.0);
                    let kt = BOLTZMANN * t50;
                    let pref = (4.0 * omega * kt / (HBAR * std::f64::consts::PI)).sqrt();
                    let amp =
                        u * qpt_rate / (pref * (-microev_to_joule(d1) / kt).exp());
                    (Some(d1), Some(amp))
                } else {
                    (None, None)
                };

                devices.push(DeviceRecord {
                    device_id: device_id.clone(),
                    material: plan.material,
                    design: design_name,
                    style: d.style,
                    gap_um: d.gap_um,
                    paddle_w_um: d.paddle_w_um,
                    paddle_h_um: d.paddle_h_um,
                    f01_ghz,
                    t1_us,
                    gamma1_hz: 1.0 / (t1_us * 1e-6),
                    qpt_rate_hz: qpt_rate,
                    re_y_norm: plan.with_re_y.then_some(re_y),
                });

                if plan.sweeps {
                    let channels = match (delta1_uev, amplitude) {
                        (Some(d1), Some(a)) => {
                            vec![SubgapChannel::new(microev_to_joule(d1), a)?]
                        }
                        _ => Vec::new(),
                    };
                    let params = TwoGapModelParams::new(
                        qpt_rate,
                        microev_to_joule(delta0_uev),
                        channels,
                        omega,
                    )?;
                    let sweep = synthesize_sweep_stream(
                        &params,
                        &t_grid,
                        spec.sweep_noise_rel,
                        seed,
                        2 * index + 1,
                    )?;
                    sweeps.insert(device_id.clone(), sweep);
                }

                per_device.insert(
                    device_id,
                    DeviceTruth {
                        gamma_ne_hz: qpt_rate,
                        delta0_uev,
                        delta1_uev,
                        amplitude,
                        anomalous,
                    },
                );
                index += 1;
            }
        }
    }

    Ok(SyntheticCohort {
        devices,
        sweeps,
        truth: GroundTruth {
            seed,
            iv_reference_gap_uev: IV_REFERENCE_GAP_UEV,
            nbn_al_axis_factor: NBN_AL_AXIS_FACTOR,
            per_device,
        },
    })
}

/// [`crate::sweep::synthesize_sweep`] on an explicit RNG stream.
pub fn synthesize_sweep_stream(
    params: &TwoGapModelParams,
    t_grid_mk: &[f64],
    noise_rel: f64,
    seed: u64,
    stream: u64,
) -> Result<TemperatureSweep> {
    use crate::model::gamma_total;
    let mut rng = stream_rng(seed, stream);
    let sigma_ln = (1.0 + noise_rel).ln();
    let points = t_grid_mk
        .iter()
        .map(|&t_mk| {
            let truth = gamma_total(mk_to_kelvin(t_mk), params);
            let z = if noise_rel > 0.0 { gaussian(&mut rng) } else { 0.0 };
            let observed = truth * (sigma_ln * z).exp();
            SweepPoint {
                t_mk,
                gamma_hz: observed,
                gamma_err_hz: (noise_rel > 0.0).then(|| noise_rel * observed),
            }
        })
        .collect();
    TemperatureSweep::new(points)
}
