//! Cross-device cohort statistics: per-design medians, quality factors,
//! admittance and area regressions, and gap histograms.
//!
//! Simulated `Re[Y]` values are ingested as dimensionless inputs normalized
//! to the largest-paddle design (G); nothing here computes electromagnetic
//! admittance. Paddle "area" is the single-paddle width x height product
//! from the design table, with a configurable paddle-count multiplier.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constants::ghz_to_angular;
use crate::error::{Error, Result};
use crate::sweep::{
    classify_sweep_omega, Classification, ClassifyOptions, SweepFitResult, TemperatureSweep,
};

/// Reference band for the fitted majority-gap median, ueV.
pub const DELTA0_MEDIAN_BAND_UEV: (f64, f64) = (183.0, 193.0);
/// Reference band for the fitted subgap median, ueV.
pub const DELTA1_MEDIAN_BAND_UEV: (f64, f64) = (5.0, 30.0);
/// Parity switching times observed at base temperature, s.
pub const SWITCHING_TIME_RANGE_S: (f64, f64) = (1e-3, 1.5);

/// Capacitor paddle metallization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Material {
    Nb,
    Ta,
    Al,
    NbN,
}

impl std::str::FromStr for Material {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Nb" | "nb" => Ok(Material::Nb),
            "Ta" | "ta" => Ok(Material::Ta),
            "Al" | "al" => Ok(Material::Al),
            "NbN" | "nbn" => Ok(Material::NbN),
            other => Err(Error::Parse(format!("unknown material '{other}'"))),
        }
    }
}

impl std::fmt::Display for Material {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Material::Nb => write!(f, "Nb"),
            Material::Ta => write!(f, "Ta"),
            Material::Al => write!(f, "Al"),
            Material::NbN => write!(f, "NbN"),
        }
    }
}

/// Capacitor design label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DesignName {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl DesignName {
    pub const ALL: [DesignName; 7] = [
        DesignName::A,
        DesignName::B,
        DesignName::C,
        DesignName::D,
        DesignName::E,
        DesignName::F,
        DesignName::G,
    ];
}

impl std::str::FromStr for DesignName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(DesignName::A),
            "B" | "b" => Ok(DesignName::B),
            "C" | "c" => Ok(DesignName::C),
            "D" | "d" => Ok(DesignName::D),
            "E" | "e" => Ok(DesignName::E),
            "F" | "f" => Ok(DesignName::F),
            "G" | "g" => Ok(DesignName::G),
            other => Err(Error::Parse(format!("unknown design '{other}'"))),
        }
    }
}

impl std::fmt::Display for DesignName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            DesignName::A => 'A',
            DesignName::B => 'B',
            DesignName::C => 'C',
            DesignName::D => 'D',
            DesignName::E => 'E',
            DesignName::F => 'F',
            DesignName::G => 'G',
        };
        write!(f, "{c}")
    }
}

/// Capacitor paddle shape family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PaddleStyle {
    Tapered,
    NonTapered,
}

impl std::str::FromStr for PaddleStyle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tapered" => Ok(PaddleStyle::Tapered),
            "non-tapered" | "nontapered" | "non_tapered" => Ok(PaddleStyle::NonTapered),
            other => Err(Error::Parse(format!("unknown paddle style '{other}'"))),
        }
    }
}

impl std::fmt::Display for PaddleStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PaddleStyle::Tapered => write!(f, "tapered"),
            PaddleStyle::NonTapered => write!(f, "non-tapered"),
        }
    }
}

/// Geometry of one capacitor design.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QubitDesign {
    pub name: DesignName,
    pub style: PaddleStyle,
    /// Capacitor gap, um.
    pub gap_um: f64,
    pub paddle_w_um: f64,
    pub paddle_h_um: f64,
}

impl QubitDesign {
    /// Single-paddle area, um^2.
    pub fn paddle_area_um2(&self) -> f64 {
        self.paddle_w_um * self.paddle_h_um
    }
}

/// The seven studied designs, ordered by increasing paddle area.
pub const DESIGN_TABLE: [QubitDesign; 7] = [
    QubitDesign { name: DesignName::A, style: PaddleStyle::NonTapered, gap_um: 1.5, paddle_w_um: 300.0, paddle_h_um: 60.0 },
    QubitDesign { name: DesignName::B, style: PaddleStyle::NonTapered, gap_um: 20.0, paddle_w_um: 480.0, paddle_h_um: 60.0 },
    QubitDesign { name: DesignName::C, style: PaddleStyle::NonTapered, gap_um: 20.0, paddle_w_um: 500.0, paddle_h_um: 60.0 },
    QubitDesign { name: DesignName::D, style: PaddleStyle::Tapered, gap_um: 70.0, paddle_w_um: 440.0, paddle_h_um: 120.0 },
    QubitDesign { name: DesignName::E, style: PaddleStyle::NonTapered, gap_um: 70.0, paddle_w_um: 500.0, paddle_h_um: 120.0 },
    QubitDesign { name: DesignName::F, style: PaddleStyle::Tapered, gap_um: 250.0, paddle_w_um: 430.0, paddle_h_um: 180.0 },
    QubitDesign { name: DesignName::G, style: PaddleStyle::NonTapered, gap_um: 250.0, paddle_w_um: 480.0, paddle_h_um: 200.0 },
];

/// Look up a design's table entry.
pub fn design(name: DesignName) -> &'static QubitDesign {
    &DESIGN_TABLE[name as usize]
}

/// One measured device.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeviceRecord {
    pub device_id: String,
    pub material: Material,
    pub design: DesignName,
    pub style: PaddleStyle,
    pub gap_um: f64,
    pub paddle_w_um: f64,
    pub paddle_h_um: f64,
    /// 0-1 transition frequency, GHz.
    pub f01_ghz: f64,
    /// Relaxation time, us.
    pub t1_us: f64,
    /// Relaxation rate `1/T1`, 1/s.
    pub gamma1_hz: f64,
    /// Base-temperature QPT rate, 1/s.
    pub qpt_rate_hz: f64,
    /// Simulated junction admittance, normalized to design G.
    pub re_y_norm: Option<f64>,
}

impl DeviceRecord {
    pub fn validate(&self) -> Result<()> {
        if self.device_id.trim().is_empty() {
            return Err(Error::Parse("empty device_id".into()));
        }
        for (name, v) in [
            ("gap_um", self.gap_um),
            ("paddle_w_um", self.paddle_w_um),
            ("paddle_h_um", self.paddle_h_um),
            ("f01_ghz", self.f01_ghz),
            ("t1_us", self.t1_us),
            ("qpt_rate_hz", self.qpt_rate_hz),
        ] {
            if !(v > 0.0) {
                return Err(Error::Parse(format!("{name} must be positive, got {v}")));
            }
        }
        let t1_s = self.t1_us * 1e-6;
        if (self.gamma1_hz * t1_s - 1.0).abs() > 1e-9 {
            return Err(Error::Parse(format!(
                "gamma1 * t1 = {:.12}, expected 1 within 1e-9",
                self.gamma1_hz * t1_s
            )));
        }
        if let Some(ry) = self.re_y_norm {
            if !(ry > 0.0 && ry <= 1.0) {
                return Err(Error::Parse(format!(
                    "re_y_norm {ry} outside (0, 1] (design-G normalized)"
                )));
            }
        }
        Ok(())
    }

    /// Quality factor `2 pi f01 T1`.
    pub fn quality_factor(&self) -> f64 {
        quality_factor(self.f01_ghz * 1e9, self.t1_us * 1e-6)
    }

    /// Angular transition frequency, rad/s.
    pub fn omega(&self) -> f64 {
        ghz_to_angular(self.f01_ghz)
    }
}

/// `Q = 2 pi f01 T1` (f01 in Hz, T1 in s). Dimensionless, so any consistent
/// unit pair gives the same value.
pub fn quality_factor(f01_hz: f64, t1_s: f64) -> f64 {
    2.0 * std::f64::consts::PI * f01_hz * t1_s
}

/// Sort-based median.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Tukey-hinge quartiles `(q1, q3)`: medians of the lower and upper halves,
/// each half including the middle element for odd lengths.
pub fn quartiles(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    let half = n / 2 + n % 2;
    (median(&v[..half]), median(&v[n - half..]))
}

/// Median with interquartile range.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MedianIqr {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub n: usize,
}

impl MedianIqr {
    pub fn of(values: &[f64]) -> Self {
        let (q1, q3) = quartiles(values);
        MedianIqr {
            median: median(values),
            q1,
            q3,
            n: values.len(),
        }
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Per-design summary statistics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignStats {
    pub qpt_rate_hz: MedianIqr,
    pub gamma1_hz: MedianIqr,
    pub quality_factor: MedianIqr,
    /// `median(gamma1) >= 100 * median(qpt_rate)`.
    pub gamma1_dominates: bool,
}

/// Medians and IQRs per design. Designs absent from the input are simply
/// omitted, with a warning naming them.
pub fn design_medians(
    records: &[DeviceRecord],
) -> (BTreeMap<DesignName, DesignStats>, Vec<String>) {
    let mut groups: BTreeMap<DesignName, Vec<&DeviceRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.design).or_default().push(r);
    }
    let mut out = BTreeMap::new();
    for (name, rs) in &groups {
        let qpt: Vec<f64> = rs.iter().map(|r| r.qpt_rate_hz).collect();
        let g1: Vec<f64> = rs.iter().map(|r| r.gamma1_hz).collect();
        let q: Vec<f64> = rs.iter().map(|r| r.quality_factor()).collect();
        let qpt_stats = MedianIqr::of(&qpt);
        let g1_stats = MedianIqr::of(&g1);
        out.insert(
            *name,
            DesignStats {
                gamma1_dominates: g1_stats.median >= 100.0 * qpt_stats.median,
                qpt_rate_hz: qpt_stats,
                gamma1_hz: g1_stats,
                quality_factor: MedianIqr::of(&q),
            },
        );
    }
    let warnings = DesignName::ALL
        .iter()
        .filter(|d| !groups.contains_key(d))
        .map(|d| format!("design {d}: no records, omitted"))
        .collect();
    (out, warnings)
}

/// Ordinary least squares `y = intercept + slope * x` with standard errors.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub slope_err: f64,
    pub intercept_err: f64,
    pub n: usize,
}

fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "{n} points for a linear fit; need at least 3"
        )));
    }
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let syy: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    if sxx <= 0.0 {
        return Err(Error::RankDeficient(
            "all abscissa values identical".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - rss / syy } else { 1.0 };
    let s2 = rss / (nf - 2.0).max(1.0);
    Ok(LinearFit {
        slope,
        intercept,
        r2,
        slope_err: (s2 / sxx).sqrt(),
        intercept_err: (s2 * (1.0 / nf + mean_x * mean_x / sxx)).sqrt(),
        n,
    })
}

/// QPT rate vs normalized admittance, fitted per paddle style. Groups with
/// fewer than 3 usable records are omitted with a warning.
pub fn fit_qpt_vs_admittance(
    records: &[DeviceRecord],
) -> Result<(BTreeMap<PaddleStyle, LinearFit>, Vec<String>)> {
    let mut groups: BTreeMap<PaddleStyle, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        if let Some(ry) = r.re_y_norm {
            let g = groups.entry(r.style).or_default();
            g.0.push(ry);
            g.1.push(r.qpt_rate_hz);
        }
    }
    let mut out = BTreeMap::new();
    let mut warnings = Vec::new();
    for (style, (xs, ys)) in groups {
        if xs.len() < 3 {
            warnings.push(format!(
                "{style}: only {} records with Re[Y]; group omitted",
                xs.len()
            ));
            continue;
        }
        out.insert(style, ols(&xs, &ys)?);
    }
    Ok((out, warnings))
}

/// Functional form for area-trend fits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrendForm {
    Linear,
    Exponential,
}

/// Trend fit `y = a + b*x` or `y = a * exp(b*x)` (the latter fitted
/// linearly in `ln y`, with non-positive points rejected and reported).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrendFit {
    pub form: TrendForm,
    pub a: f64,
    pub b: f64,
    /// r^2 of the underlying least-squares problem (log space for the
    /// exponential form).
    pub r2: f64,
    /// `n ln(RSS/n) + 2k` computed on the original `y` scale over the
    /// points actually used, so forms are comparable.
    pub aic: f64,
    /// Indices of points rejected (non-positive y under the exponential
    /// form).
    pub rejected: Vec<usize>,
}

/// Fit a trend of `values` against `areas`.
pub fn fit_area_trend(areas: &[f64], values: &[f64], form: TrendForm) -> Result<TrendFit> {
    if areas.len() != values.len() {
        return Err(Error::domain("areas and values length mismatch"));
    }
    if areas.len() < 3 {
        return Err(Error::InsufficientData("need at least 3 points".into()));
    }
    match form {
        TrendForm::Linear => {
            let f = ols(areas, values)?;
            let rss: f64 = areas
                .iter()
                .zip(values)
                .map(|(x, y)| {
                    let r = y - f.intercept - f.slope * x;
                    r * r
                })
                .sum();
            let n = areas.len() as f64;
            Ok(TrendFit {
                form,
                a: f.intercept,
                b: f.slope,
                r2: f.r2,
                aic: n * (rss / n).max(1e-300).ln() + 4.0,
                rejected: Vec::new(),
            })
        }
        TrendForm::Exponential => {
            let mut xs = Vec::new();
            let mut lys = Vec::new();
            let mut used = Vec::new();
            let mut rejected = Vec::new();
            for (i, (&x, &y)) in areas.iter().zip(values).enumerate() {
                if y > 0.0 {
                    xs.push(x);
                    lys.push(y.ln());
                    used.push(i);
                } else {
                    rejected.push(i);
                }
            }
            if xs.len() < 3 {
                return Err(Error::InsufficientData(
                    "fewer than 3 positive points for exponential fit".into(),
                ));
            }
            let f = ols(&xs, &lys)?;
            let a = f.intercept.exp();
            let b = f.slope;
            let rss: f64 = used
                .iter()
                .map(|&i| {
                    let r = values[i] - a * (b * areas[i]).exp();
                    r * r
                })
                .sum();
            let n = xs.len() as f64;
            Ok(TrendFit {
                form,
                a,
                b,
                r2: f.r2,
                aic: n * (rss / n).max(1e-300).ln() + 4.0,
                rejected,
            })
        }
    }
}

/// Equal-width histogram with medians.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
    pub stats: MedianIqr,
}

fn histogram(values: &[f64], bins: usize) -> Histogram {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Histogram {
        lo,
        hi,
        counts,
        stats: MedianIqr::of(values),
    }
}

/// Gap histograms built from per-device fit results.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapHistograms {
    pub delta0_uev: Histogram,
    /// Present when at least one fit carried a subgap channel.
    pub delta1_uev: Option<Histogram>,
    pub delta0_median_in_band: bool,
    pub delta1_median_in_band: Option<bool>,
    /// Median of per-device `delta1/delta0` over two-gap fits.
    pub ratio_median: Option<f64>,
}

/// Build gap histograms from at least 10 fit results. `delta1` enters only
/// from fits that carry a subgap channel.
pub fn gap_histograms(fits: &[SweepFitResult], bins: usize) -> Result<GapHistograms> {
    if fits.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "{} fit results; need at least 10 for histograms",
            fits.len()
        )));
    }
    if bins == 0 {
        return Err(Error::domain("bins must be positive"));
    }
    let delta0s: Vec<f64> = fits.iter().map(|f| f.delta0_microev()).collect();
    let delta1s: Vec<f64> = fits.iter().filter_map(|f| f.delta1_microev()).collect();
    let ratios: Vec<f64> = fits
        .iter()
        .filter_map(|f| f.delta1_microev().map(|d1| d1 / f.delta0_microev()))
        .collect();
    let d0 = histogram(&delta0s, bins);
    let delta0_median_in_band = (DELTA0_MEDIAN_BAND_UEV.0..=DELTA0_MEDIAN_BAND_UEV.1)
        .contains(&d0.stats.median);
    let (d1, in_band, ratio_median) = if delta1s.is_empty() {
        (None, None, None)
    } else {
        let h = histogram(&delta1s, bins);
        let ok = (DELTA1_MEDIAN_BAND_UEV.0..=DELTA1_MEDIAN_BAND_UEV.1).contains(&h.stats.median);
        (Some(h), Some(ok), Some(median(&ratios)))
    };
    Ok(GapHistograms {
        delta0_uev: d0,
        delta1_uev: d1,
        delta0_median_in_band,
        delta1_median_in_band: in_band,
        ratio_median,
    })
}

/// Options for the full cohort analysis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub classify: ClassifyOptions,
    /// Multiplier applied to the single-paddle area in trend fits.
    pub paddle_count: f64,
    pub histogram_bins: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            classify: ClassifyOptions::default(),
            paddle_count: 1.0,
            histogram_bins: 12,
        }
    }
}

/// Per-device sweep-fit summary in interface units.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSummary {
    pub classification: Classification,
    pub delta0_uev: f64,
    pub delta0_err_uev: f64,
    pub delta1_uev: Option<f64>,
    pub delta1_err_uev: Option<f64>,
    pub gamma_ne_hz: f64,
    pub aic_single: f64,
    pub aic_two: f64,
    pub chi2_reduced: f64,
}

/// Full cohort report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CohortReport {
    pub n_devices: usize,
    pub per_material: BTreeMap<String, BTreeMap<String, DesignStats>>,
    pub admittance_fits: BTreeMap<String, LinearFit>,
    /// Difference of per-style slopes (non-tapered minus tapered) when both
    /// groups were fittable.
    pub admittance_slope_contrast: Option<f64>,
    pub qpt_area_trend_linear: Option<TrendFit>,
    pub qpt_area_trend_exponential: Option<TrendFit>,
    pub re_y_area_trend: Option<TrendFit>,
    pub sweep_fits: BTreeMap<String, SweepSummary>,
    pub n_conventional: usize,
    pub n_anomalous: usize,
    pub gap_histograms: Option<GapHistograms>,
    /// All base-temperature switching times within the observed range.
    pub switching_times_in_range: bool,
    pub warnings: Vec<String>,
    /// Free-form dataset metadata (for synthetic cohorts: ground-truth
    /// pointers and reference values).
    pub dataset_metadata: Option<serde_json::Value>,
}

/// Run the full population analysis over device records and any per-device
/// temperature sweeps.
pub fn analyze_cohort(
    records: &[DeviceRecord],
    sweeps: &BTreeMap<String, TemperatureSweep>,
    opts: &AnalyzeOptions,
) -> Result<CohortReport> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no device records".into()));
    }
    let mut warnings = Vec::new();

    // Per-material, per-design medians.
    let mut per_material = BTreeMap::new();
    let mut by_material: BTreeMap<Material, Vec<DeviceRecord>> = BTreeMap::new();
    for r in records {
        by_material.entry(r.material).or_default().push(r.clone());
    }
    for (mat, rs) in &by_material {
        let (stats, w) = design_medians(rs);
        warnings.extend(w.into_iter().map(|m| format!("{mat}: {m}")));
        per_material.insert(
            mat.to_string(),
            stats
                .into_iter()
                .map(|(d, s)| (d.to_string(), s))
                .collect(),
        );
    }

    // Admittance regressions per paddle style.
    let (adm_fits, w) = fit_qpt_vs_admittance(records)?;
    warnings.extend(w);
    let admittance_slope_contrast = match (
        adm_fits.get(&PaddleStyle::NonTapered),
        adm_fits.get(&PaddleStyle::Tapered),
    ) {
        (Some(nt), Some(t)) => Some(nt.slope - t.slope),
        _ => None,
    };
    let admittance_fits = adm_fits
        .into_iter()
        .map(|(s, f)| (s.to_string(), f))
        .collect();

    // Area trends over per-design means.
    let mut per_design: BTreeMap<DesignName, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let e = per_design.entry(r.design).or_default();
        e.0.push(r.qpt_rate_hz);
        if let Some(ry) = r.re_y_norm {
            e.1.push(ry);
        }
    }
    let mut areas = Vec::new();
    let mut mean_qpt = Vec::new();
    let mut mean_rey = Vec::new();
    let mut rey_areas = Vec::new();
    for (name, (qpts, reys)) in &per_design {
        let area = design(*name).paddle_area_um2() * opts.paddle_count;
        areas.push(area);
        mean_qpt.push(qpts.iter().sum::<f64>() / qpts.len() as f64);
        if !reys.is_empty() {
            rey_areas.push(area);
            mean_rey.push(reys.iter().sum::<f64>() / reys.len() as f64);
        }
    }
    let trend_or_warn = |res: Result<TrendFit>, what: &str, warnings: &mut Vec<String>| match res {
        Ok(t) => Some(t),
        Err(e) => {
            warnings.push(format!("{what}: {e}"));
            None
        }
    };
    let qpt_area_trend_linear = trend_or_warn(
        fit_area_trend(&areas, &mean_qpt, TrendForm::Linear),
        "qpt-vs-area linear trend",
        &mut warnings,
    );
    let qpt_area_trend_exponential = trend_or_warn(
        fit_area_trend(&areas, &mean_qpt, TrendForm::Exponential),
        "qpt-vs-area exponential trend",
        &mut warnings,
    );
    let re_y_area_trend = trend_or_warn(
        fit_area_trend(&rey_areas, &mean_rey, TrendForm::Exponential),
        "re_y-vs-area trend",
        &mut warnings,
    );

    // Sweep fits and classification.
    let record_of: BTreeMap<&str, &DeviceRecord> =
        records.iter().map(|r| (r.device_id.as_str(), r)).collect();
    let mut sweep_fits = BTreeMap::new();
    let mut selected_fits = Vec::new();
    let (mut n_conventional, mut n_anomalous) = (0usize, 0usize);
    for (device_id, sweep) in sweeps {
        let Some(rec) = record_of.get(device_id.as_str()) else {
            warnings.push(format!("sweep for unknown device '{device_id}' ignored"));
            continue;
        };
        match classify_sweep_omega(sweep, rec.omega(), &opts.classify) {
            Ok(report) => {
                let chosen = match report.label {
                    Classification::Anomalous => {
                        n_anomalous += 1;
                        report.two.clone()
                    }
                    Classification::Conventional => {
                        n_conventional += 1;
                        report.single.clone()
                    }
                };
                sweep_fits.insert(
                    device_id.clone(),
                    SweepSummary {
                        classification: report.label,
                        delta0_uev: chosen.delta0_microev(),
                        delta0_err_uev: crate::constants::joule_to_microev(
                            chosen.errors.delta0_joule,
                        ),
                        delta1_uev: chosen.delta1_microev(),
                        delta1_err_uev: chosen
                            .errors
                            .delta1_joule
                            .map(crate::constants::joule_to_microev),
                        gamma_ne_hz: chosen.params.gamma_ne_hz,
                        aic_single: report.aic_single,
                        aic_two: report.aic_two,
                        chi2_reduced: chosen.chi2_reduced,
                    },
                );
                selected_fits.push(chosen);
            }
            Err(e) => warnings.push(format!("sweep fit failed for '{device_id}': {e}")),
        }
    }

    let gap_hists = if selected_fits.len() >= 10 {
        Some(gap_histograms(&selected_fits, opts.histogram_bins)?)
    } else {
        if !selected_fits.is_empty() {
            warnings.push(format!(
                "{} sweep fits; histograms need at least 10",
                selected_fits.len()
            ));
        }
        None
    };

    let switching_times_in_range = records.iter().all(|r| {
        let tau = 1.0 / r.qpt_rate_hz;
        (SWITCHING_TIME_RANGE_S.0..=SWITCHING_TIME_RANGE_S.1).contains(&tau)
    });

    Ok(CohortReport {
        n_devices: records.len(),
        per_material,
        admittance_fits,
        admittance_slope_contrast,
        qpt_area_trend_linear,
        qpt_area_trend_exponential,
        re_y_area_trend,
        sweep_fits,
        n_conventional,
        n_anomalous,
        gap_histograms: gap_hists,
        switching_times_in_range,
        warnings,
        dataset_metadata: None,
    })
}
