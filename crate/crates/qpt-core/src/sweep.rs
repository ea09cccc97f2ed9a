//! Temperature-sweep fitting: gap extraction, sweep classification, and
//! bootstrap uncertainties.
//!
//! Rates span several decades across a sweep, so fits run on `log10(rate)`
//! with per-point weights from reported errors (unit weights when errors are
//! absent). Free parameters are `(gamma_ne, delta0)` for the single-gap
//! model and `(gamma_ne, delta0, A, delta1)` with `delta1 < delta0` for the
//! two-gap model; only one subgap channel is fitted even though the forward
//! model accepts any number.

use serde::{Deserialize, Serialize};

use crate::constants::{microev_to_joule, mk_to_kelvin, BOLTZMANN, HBAR};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::model::{gamma_total, SubgapChannel, TwoGapModelParams};
use crate::optimize::{fit, FitReport, GaussNewtonOptions, LeastSquaresModel};
use crate::rng::stream_rng;
use crate::transmon::QubitParams;

const LN10: f64 = std::f64::consts::LN_10;

/// One measured QPT rate at one stage temperature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Stage temperature, mK.
    pub t_mk: f64,
    /// Measured QPT rate, 1/s.
    pub gamma_hz: f64,
    /// Reported rate uncertainty, 1/s.
    pub gamma_err_hz: Option<f64>,
}

/// A per-device QPT-rate-vs-temperature curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSweep {
    pub points: Vec<SweepPoint>,
}

impl TemperatureSweep {
    pub fn new(points: Vec<SweepPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData("empty sweep".into()));
        }
        for w in points.windows(2) {
            if w[1].t_mk <= w[0].t_mk {
                return Err(Error::domain("temperatures must be strictly increasing"));
            }
        }
        for p in &points {
            if !(p.gamma_hz > 0.0) {
                return Err(Error::domain("rates must be positive"));
            }
            if let Some(e) = p.gamma_err_hz {
                if !(e > 0.0) {
                    return Err(Error::domain("rate errors must be positive when present"));
                }
            }
        }
        Ok(TemperatureSweep { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Which thermal model to fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    SingleGap,
    TwoGap,
}

impl ModelKind {
    fn n_params(self) -> usize {
        match self {
            ModelKind::SingleGap => 2,
            ModelKind::TwoGap => 4,
        }
    }
}

/// Temperature-trend class of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Flat non-equilibrium background with a single thermal onset.
    Conventional,
    /// Departure from the flat background below ~100 mK explained by a
    /// subgap channel.
    Anomalous,
}

/// Standard errors of the fitted parameters (delta method from the fit
/// covariance in log space).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepParamErrors {
    pub gamma_ne_hz: f64,
    pub delta0_joule: f64,
    pub amplitude: Option<f64>,
    pub delta1_joule: Option<f64>,
}

/// Outcome of one temperature-sweep fit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepFitResult {
    pub params: TwoGapModelParams,
    pub errors: SweepParamErrors,
    pub model_kind: ModelKind,
    /// Set when the fit was produced by [`classify_sweep`].
    pub classification: Option<Classification>,
    pub aic: f64,
    pub chi2_reduced: f64,
    pub iterations: usize,
    /// Names of parameters pinned at a feasibility bound.
    pub at_bound: Vec<String>,
}

impl SweepFitResult {
    pub fn delta0_microev(&self) -> f64 {
        self.params.delta0_microev()
    }

    pub fn delta1_microev(&self) -> Option<f64> {
        self.params
            .channels
            .first()
            .map(|c| crate::constants::joule_to_microev(c.delta_joule))
    }
}

// Parameter boxes, in log space.
const LN_GAMMA_NE_BOUNDS: (f64, f64) = (-27.631021115928547, 27.631021115928547); // 1e-12..1e12
const DELTA0_BOUNDS_UEV: (f64, f64) = (1.0, 2000.0);
const LN_AMP_BOUNDS: (f64, f64) = (-36.841361487904734, 13.815510557964274); // 1e-16..1e6
const DELTA1_MIN_UEV: f64 = 0.1;
/// `delta1` is kept strictly below `delta0` by this factor.
const DELTA1_CEILING: f64 = 0.999;

/// Log-rate sweep model over transformed parameters
/// `[ln gamma_ne, ln delta0, (ln A, ln delta1)]`.
struct SweepModel {
    t_kelvin: Vec<f64>,
    log10_rates: Vec<f64>,
    /// 1 / sigma_log10 per point.
    inv_sigma: Vec<f64>,
    omega: f64,
    kind: ModelKind,
}

impl SweepModel {
    fn params_of(&self, u: &[f64]) -> TwoGapModelParams {
        let channels = match self.kind {
            ModelKind::SingleGap => Vec::new(),
            ModelKind::TwoGap => vec![SubgapChannel {
                delta_joule: u[3].exp(),
                amplitude: u[2].exp(),
                x_frac: None,
                r_eff_ohm: None,
            }],
        };
        TwoGapModelParams {
            gamma_ne_hz: u[0].exp(),
            delta0_joule: u[1].exp(),
            channels,
            omega: self.omega,
        }
    }

    fn rate_and_gradient(&self, u: &[f64], t: f64) -> (f64, Vec<f64>) {
        let gamma_ne = u[0].exp();
        let delta0 = u[1].exp();
        let kt = BOLTZMANN * t;
        let pref = (4.0 * self.omega * kt / (HBAR * std::f64::consts::PI)).sqrt();
        let majority = pref * (-delta0 / kt).exp();
        let mut rate = gamma_ne + majority;
        let mut grad = vec![gamma_ne, majority * (-delta0 / kt)];
        if self.kind == ModelKind::TwoGap {
            let amp = u[2].exp();
            let delta1 = u[3].exp();
            let sub = pref * amp * (-delta1 / kt).exp();
            rate += sub;
            grad.push(sub);
            grad.push(sub * (-delta1 / kt));
        }
        (rate, grad)
    }
}

impl LeastSquaresModel for SweepModel {
    fn n_params(&self) -> usize {
        self.kind.n_params()
    }
    fn n_residuals(&self) -> usize {
        self.t_kelvin.len()
    }
    fn residuals(&self, u: &[f64], out: &mut [f64]) {
        for (i, &t) in self.t_kelvin.iter().enumerate() {
            let (rate, _) = self.rate_and_gradient(u, t);
            out[i] = (rate.log10() - self.log10_rates[i]) * self.inv_sigma[i];
        }
    }
    fn jacobian(&self, u: &[f64], out: &mut [f64]) {
        let p = self.n_params();
        for (i, &t) in self.t_kelvin.iter().enumerate() {
            let (rate, grad) = self.rate_and_gradient(u, t);
            for (j, g) in grad.iter().enumerate() {
                out[i * p + j] = g / (rate * LN10) * self.inv_sigma[i];
            }
        }
    }
    fn project(&self, u: &mut [f64]) {
        u[0] = u[0].clamp(LN_GAMMA_NE_BOUNDS.0, LN_GAMMA_NE_BOUNDS.1);
        let d0_bounds = (
            microev_to_joule(DELTA0_BOUNDS_UEV.0).ln(),
            microev_to_joule(DELTA0_BOUNDS_UEV.1).ln(),
        );
        u[1] = u[1].clamp(d0_bounds.0, d0_bounds.1);
        if self.kind == ModelKind::TwoGap {
            u[2] = u[2].clamp(LN_AMP_BOUNDS.0, LN_AMP_BOUNDS.1);
            let d1_max = u[1] + DELTA1_CEILING.ln();
            u[3] = u[3].clamp(microev_to_joule(DELTA1_MIN_UEV).ln(), d1_max);
        }
    }
}

fn build_model(sweep: &TemperatureSweep, kind: ModelKind, omega: f64) -> Result<SweepModel> {
    if sweep.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "{} temperature points; need at least 6",
            sweep.len()
        )));
    }
    let max = sweep.points.iter().map(|p| p.gamma_hz).fold(0.0, f64::max);
    let min = sweep
        .points
        .iter()
        .map(|p| p.gamma_hz)
        .fold(f64::INFINITY, f64::min);
    if max / min < 3.0 {
        return Err(Error::InsufficientData(
            "sweep shows no thermal onset (max/min rate < 3)".into(),
        ));
    }
    let all_have_errors = sweep.points.iter().all(|p| p.gamma_err_hz.is_some());
    let inv_sigma = sweep
        .points
        .iter()
        .map(|p| {
            if all_have_errors {
                let sigma_log = p.gamma_err_hz.unwrap() / (p.gamma_hz * LN10);
                1.0 / sigma_log.max(1e-6)
            } else {
                1.0
            }
        })
        .collect();
    Ok(SweepModel {
        t_kelvin: sweep.points.iter().map(|p| mk_to_kelvin(p.t_mk)).collect(),
        log10_rates: sweep.points.iter().map(|p| p.gamma_hz.log10()).collect(),
        inv_sigma,
        omega,
        kind,
    })
}

/// Initial guesses: background from the three lowest-T points, majority gap
/// from the Arrhenius slope over the highest-T third, subgap channel at a
/// tenth of the majority gap with an amplitude explaining the largest
/// low-T excess.
fn initial_guess(sweep: &TemperatureSweep, kind: ModelKind, omega: f64) -> Vec<f64> {
    let pts = &sweep.points;
    let n = pts.len();

    let mut low: Vec<f64> = pts.iter().take(3).map(|p| p.gamma_hz).collect();
    low.sort_by(|a, b| a.total_cmp(b));
    let gamma_ne0 = low[low.len() / 2].max(1e-12);

    let top_third = &pts[n - (n / 3).max(3).min(n)..];
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for p in top_third {
        let x = 1.0 / mk_to_kelvin(p.t_mk);
        let y = p.gamma_hz.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let m = top_third.len() as f64;
    let denom = m * sxx - sx * sx;
    let slope = if denom.abs() > 0.0 {
        (m * sxy - sx * sy) / denom
    } else {
        0.0
    };
    let delta0_guess = if slope < 0.0 {
        (-slope * BOLTZMANN).clamp(
            microev_to_joule(DELTA0_BOUNDS_UEV.0),
            microev_to_joule(DELTA0_BOUNDS_UEV.1),
        )
    } else {
        // No visible onset: park the gap high so the thermal term is small.
        microev_to_joule(500.0)
    };

    let mut u = vec![gamma_ne0.ln(), delta0_guess.ln()];
    if kind == ModelKind::TwoGap {
        let delta1_guess = delta0_guess / 10.0;
        let mut amp0: f64 = 1e-10;
        for p in pts.iter().filter(|p| p.t_mk < 120.0) {
            let t = mk_to_kelvin(p.t_mk);
            let kt = BOLTZMANN * t;
            let pref = (4.0 * omega * kt / (HBAR * std::f64::consts::PI)).sqrt();
            let majority = pref * (-delta0_guess / kt).exp();
            let excess = p.gamma_hz - gamma_ne0 - majority;
            if excess > 0.0 {
                let cand = excess / (pref * (-delta1_guess / kt).exp());
                amp0 = amp0.max(cand);
            }
        }
        u.push(amp0.clamp(LN_AMP_BOUNDS.0.exp(), LN_AMP_BOUNDS.1.exp()).ln());
        u.push(delta1_guess.ln());
    }
    u
}

fn result_from_report(
    report: &FitReport,
    model: &SweepModel,
    kind: ModelKind,
) -> SweepFitResult {
    let u = &report.params;
    let params = model.params_of(u);
    let n_params = kind.n_params();

    let mut at_bound = Vec::new();
    let close = |v: f64, b: f64| (v - b).abs() < 1e-9;
    if close(u[0], LN_GAMMA_NE_BOUNDS.0) || close(u[0], LN_GAMMA_NE_BOUNDS.1) {
        at_bound.push("gamma_ne".to_string());
    }
    let d0b = (
        microev_to_joule(DELTA0_BOUNDS_UEV.0).ln(),
        microev_to_joule(DELTA0_BOUNDS_UEV.1).ln(),
    );
    if close(u[1], d0b.0) || close(u[1], d0b.1) {
        at_bound.push("delta0".to_string());
    }
    if kind == ModelKind::TwoGap {
        if close(u[2], LN_AMP_BOUNDS.0) || close(u[2], LN_AMP_BOUNDS.1) {
            at_bound.push("amplitude".to_string());
        }
        if close(u[3], microev_to_joule(DELTA1_MIN_UEV).ln())
            || close(u[3], u[1] + DELTA1_CEILING.ln())
        {
            at_bound.push("delta1".to_string());
        }
    }

    // Delta method: sigma(natural) = natural * sigma(ln natural); floored so
    // reported errors stay positive even for a perfect fit.
    let err_of = |j: usize, natural: f64| (natural * report.std_error(j)).max(natural * 1e-12);
    let errors = SweepParamErrors {
        gamma_ne_hz: err_of(0, params.gamma_ne_hz),
        delta0_joule: err_of(1, params.delta0_joule),
        amplitude: (kind == ModelKind::TwoGap)
            .then(|| err_of(2, params.channels[0].amplitude)),
        delta1_joule: (kind == ModelKind::TwoGap)
            .then(|| err_of(3, params.channels[0].delta_joule)),
    };

    let dof = (report.n_residuals - n_params).max(1) as f64;
    SweepFitResult {
        params,
        errors,
        model_kind: kind,
        classification: None,
        aic: report.cost + 2.0 * n_params as f64,
        chi2_reduced: report.cost / dof,
        iterations: report.iterations,
        at_bound,
    }
}

/// Fit a temperature sweep with the angular frequency given directly.
pub fn fit_temperature_sweep_omega(
    sweep: &TemperatureSweep,
    kind: ModelKind,
    omega: f64,
) -> Result<SweepFitResult> {
    let model = build_model(sweep, kind, omega)?;
    let init = initial_guess(sweep, kind, omega);
    let report = fit(&model, &init, &sweep_gn_options(sweep.len()))?;
    Ok(result_from_report(&report, &model, kind))
}

/// Solver options for sweep fits: residuals below 1e-6 of a point's weight
/// are machine-flat for rate data, so the cost floor cuts off crawls along
/// degenerate channel directions.
fn sweep_gn_options(n_points: usize) -> GaussNewtonOptions {
    GaussNewtonOptions {
        cost_floor: 1e-12 * n_points as f64,
        ..GaussNewtonOptions::default()
    }
}

/// Fit a temperature sweep for a qubit (its `omega` enters the prefactor).
pub fn fit_temperature_sweep(
    sweep: &TemperatureSweep,
    kind: ModelKind,
    qubit: &QubitParams,
) -> Result<SweepFitResult> {
    fit_temperature_sweep_omega(sweep, kind, qubit.omega)
}

/// Classification thresholds.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Two-gap model must beat single-gap by this AIC margin.
    pub aic_margin: f64,
    /// Subgap term must exceed `factor * gamma_ne` somewhere below
    /// `upturn_tmax_mk`.
    pub subgap_factor: f64,
    pub upturn_tmax_mk: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            aic_margin: 4.0,
            subgap_factor: 0.2,
            upturn_tmax_mk: 100.0,
        }
    }
}

/// Classification outcome with the evidence that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub label: Classification,
    pub aic_single: f64,
    pub aic_two: f64,
    /// Peak of `subgap term / gamma_ne` below the upturn window.
    pub subgap_over_background: f64,
    pub single: SweepFitResult,
    pub two: SweepFitResult,
}

/// Fit both model kinds and label the sweep.
pub fn classify_sweep(
    sweep: &TemperatureSweep,
    qubit: &QubitParams,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    classify_sweep_omega(sweep, qubit.omega, opts)
}

/// [`classify_sweep`] with the angular frequency given directly.
pub fn classify_sweep_omega(
    sweep: &TemperatureSweep,
    omega: f64,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    let mut single = fit_temperature_sweep_omega(sweep, ModelKind::SingleGap, omega)?;
    let mut two = fit_temperature_sweep_omega(sweep, ModelKind::TwoGap, omega)?;

    let channel = &two.params.channels[0];
    let gamma_ne = two.params.gamma_ne_hz.max(1e-300);
    let mut subgap_ratio: f64 = 0.0;
    let mut t_mk = 2.0;
    while t_mk <= opts.upturn_tmax_mk {
        let t = mk_to_kelvin(t_mk);
        let kt = BOLTZMANN * t;
        let pref = (4.0 * omega * kt / (HBAR * std::f64::consts::PI)).sqrt();
        let sub = pref * channel.amplitude * (-channel.delta_joule / kt).exp();
        subgap_ratio = subgap_ratio.max(sub / gamma_ne);
        t_mk += 1.0;
    }

    let label = if two.aic < single.aic - opts.aic_margin && subgap_ratio > opts.subgap_factor {
        Classification::Anomalous
    } else {
        Classification::Conventional
    };
    single.classification = Some(label);
    two.classification = Some(label);
    Ok(ClassificationReport {
        label,
        aic_single: single.aic,
        aic_two: two.aic,
        subgap_over_background: subgap_ratio,
        single,
        two,
    })
}

/// Bootstrap configuration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of residual resamples; at least 100.
    pub n_resamples: usize,
    pub seed: u64,
    /// Central interval coverage, e.g. 0.95.
    pub level: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            n_resamples: 500,
            seed: 0,
            level: 0.95,
        }
    }
}

/// Percentile intervals per parameter from residual resampling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BootstrapIntervals {
    pub level: f64,
    pub gamma_ne_hz: (f64, f64),
    pub delta0_joule: (f64, f64),
    pub amplitude: Option<(f64, f64)>,
    pub delta1_joule: Option<(f64, f64)>,
    pub n_resamples: usize,
    pub n_failed: usize,
    /// Set when more than 20% of the refits failed.
    pub reliability_warning: bool,
}

/// Residual-resampling bootstrap in log space. Replica `k` draws from
/// stream `k` of the seed, so intervals are reproducible and independent of
/// execution strategy.
pub fn bootstrap_uncertainty_exec(
    sweep: &TemperatureSweep,
    kind: ModelKind,
    omega: f64,
    cfg: &BootstrapConfig,
    exec: Exec,
) -> Result<BootstrapIntervals> {
    if cfg.n_resamples < 100 {
        return Err(Error::domain("need at least 100 bootstrap resamples"));
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::domain("level must lie in (0, 1)"));
    }
    let base = fit_temperature_sweep_omega(sweep, kind, omega)?;
    let fitted_log10: Vec<f64> = sweep
        .points
        .iter()
        .map(|p| gamma_total(mk_to_kelvin(p.t_mk), &base.params).log10())
        .collect();
    let residuals: Vec<f64> = sweep
        .points
        .iter()
        .zip(&fitted_log10)
        .map(|(p, m)| p.gamma_hz.log10() - m)
        .collect();
    let base_init = {
        let model = build_model(sweep, kind, omega)?;
        // Transformed parameters of the base fit, reused as warm starts.
        let mut u = vec![
            base.params.gamma_ne_hz.ln(),
            base.params.delta0_joule.ln(),
        ];
        if kind == ModelKind::TwoGap {
            u.push(base.params.channels[0].amplitude.ln());
            u.push(base.params.channels[0].delta_joule.ln());
        }
        let _ = model; // model only constructed to validate the sweep
        u
    };

    let n = sweep.len();
    let replicas: Vec<Option<Vec<f64>>> = map_indexed(exec, cfg.n_resamples, |k| {
        use rand::Rng;
        let mut rng = stream_rng(cfg.seed, k as u64);
        let points: Vec<SweepPoint> = sweep
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let draw = residuals[rng.gen_range(0..n)];
                SweepPoint {
                    t_mk: p.t_mk,
                    gamma_hz: 10f64.powf(fitted_log10[i] + draw),
                    gamma_err_hz: p.gamma_err_hz,
                }
            })
            .collect();
        let resampled = TemperatureSweep { points };
        let model = build_model(&resampled, kind, omega).ok()?;
        let report = fit(&model, &base_init, &sweep_gn_options(n)).ok()?;
        let r = result_from_report(&report, &model, kind);
        let mut row = vec![r.params.gamma_ne_hz, r.params.delta0_joule];
        if kind == ModelKind::TwoGap {
            row.push(r.params.channels[0].amplitude);
            row.push(r.params.channels[0].delta_joule);
        }
        Some(row)
    });

    let good: Vec<&Vec<f64>> = replicas.iter().flatten().collect();
    let n_failed = cfg.n_resamples - good.len();
    if good.len() < 2 {
        return Err(Error::InsufficientData(
            "bootstrap: fewer than 2 successful refits".into(),
        ));
    }
    let percentile_pair = |idx: usize| -> (f64, f64) {
        let mut vals: Vec<f64> = good.iter().map(|r| r[idx]).collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        let alpha = (1.0 - cfg.level) / 2.0;
        (quantile_sorted(&vals, alpha), quantile_sorted(&vals, 1.0 - alpha))
    };

    Ok(BootstrapIntervals {
        level: cfg.level,
        gamma_ne_hz: percentile_pair(0),
        delta0_joule: percentile_pair(1),
        amplitude: (kind == ModelKind::TwoGap).then(|| percentile_pair(2)),
        delta1_joule: (kind == ModelKind::TwoGap).then(|| percentile_pair(3)),
        n_resamples: cfg.n_resamples,
        n_failed,
        reliability_warning: n_failed as f64 > 0.2 * cfg.n_resamples as f64,
    })
}

/// [`bootstrap_uncertainty_exec`] with the default execution strategy.
pub fn bootstrap_uncertainty(
    sweep: &TemperatureSweep,
    kind: ModelKind,
    qubit: &QubitParams,
    cfg: &BootstrapConfig,
) -> Result<BootstrapIntervals> {
    bootstrap_uncertainty_exec(sweep, kind, qubit.omega, cfg, Exec::default())
}

/// Linear-interpolated quantile of an ascending slice.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Generate a noisy synthetic sweep from model truth: multiplicative
/// log-normal noise of relative scale `noise_rel` plus matching reported
/// errors.
pub fn synthesize_sweep(
    params: &TwoGapModelParams,
    t_grid_mk: &[f64],
    noise_rel: f64,
    seed: u64,
) -> Result<TemperatureSweep> {
    use rand::Rng;
    if noise_rel < 0.0 {
        return Err(Error::domain("noise_rel must be non-negative"));
    }
    let mut rng = stream_rng(seed, 0);
    let sigma_ln = (1.0 + noise_rel).ln();
    let points = t_grid_mk
        .iter()
        .map(|&t_mk| {
            let truth = gamma_total(mk_to_kelvin(t_mk), params);
            let z: f64 = if noise_rel > 0.0 {
                let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            } else {
                0.0
            };
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

/// Evenly spaced temperature grid, mK.
pub fn linspace_mk(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}
