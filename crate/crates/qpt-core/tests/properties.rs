//! Property-based invariants across the simulation and analysis chain.

use proptest::prelude::*;

use qpt_core::constants::microev_to_joule;
use qpt_core::formats::{trace_from_json, trace_from_text, trace_to_json, trace_to_text};
use qpt_core::model::{gamma_thermal_single, gamma_total, TwoGapModelParams};
use qpt_core::spectral::{estimate_psd, fit_lorentzian, Window};
use qpt_core::telegraph::{simulate_telegraph, TelegraphConfig};
use qpt_core::transmon::cpb_spectrum;

fn telegraph(gamma: f64, fs: f64, n: usize, seed: u64) -> qpt_core::ParityTrace {
    simulate_telegraph(&TelegraphConfig {
        gamma_hz: gamma,
        fs_hz: fs,
        n_samples: n,
        seed,
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Empirical flip fraction lies within 4 binomial sigma of the
    /// closed-form flip probability for any rate and sampling rate.
    #[test]
    fn flip_statistics_follow_closed_form(
        gamma in 0.5f64..500.0,
        fs in 500.0f64..5000.0,
        seed in any::<u64>(),
    ) {
        let n = 100_000;
        let cfg = TelegraphConfig { gamma_hz: gamma, fs_hz: fs, n_samples: n, seed };
        let p = cfg.flip_probability();
        let trace = simulate_telegraph(&cfg).unwrap();
        let sigma = (p * (1.0 - p) / (n as f64 - 1.0)).sqrt();
        let dev = (trace.flip_fraction() - p).abs();
        prop_assert!(dev < 4.0 * sigma, "dev {dev} vs 4 sigma {}", 4.0 * sigma);
    }

    /// The spectrum is an even, integer-periodic function of the offset
    /// charge, bit-exactly.
    #[test]
    fn spectrum_symmetries_are_exact(
        ng_ticks in -3072i64..3072,
        ratio in 5.0f64..80.0,
        shift in 1i64..4,
    ) {
        // Dyadic offsets keep `ng + shift` exactly representable, so the
        // claimed bit-exact symmetries are testable without float slop in
        // the test inputs themselves.
        let ng = ng_ticks as f64 / 1024.0;
        let ec = 0.3;
        let ej = ec * ratio;
        let base = cpb_spectrum(ec, ej, ng, 4, 25).unwrap();
        let shifted = cpb_spectrum(ec, ej, ng + shift as f64, 4, 25).unwrap();
        let mirrored = cpb_spectrum(ec, ej, -ng, 4, 25).unwrap();
        prop_assert_eq!(&base, &shifted);
        prop_assert_eq!(&base, &mirrored);
    }

    /// Rectangular-window Welch estimates conserve the mean square of a
    /// +-1 trace.
    #[test]
    fn parseval_holds_for_rectangular_window(
        gamma in 1.0f64..200.0,
        seed in any::<u64>(),
    ) {
        let trace = telegraph(gamma, 2e3, 4096, seed);
        let psd = estimate_psd(&trace, 512, Window::Rectangular).unwrap();
        prop_assert!((psd.total_power() - 1.0).abs() < 1e-6);
    }

    /// Multi-channel totals reduce exactly to the single-gap closed form
    /// when the channel list is empty.
    #[test]
    fn empty_channels_reduce_to_closed_form(
        gamma_ne in 0.0f64..100.0,
        delta0_uev in 120.0f64..260.0,
        t_mk in 10.0f64..300.0,
        f_ghz in 3.0f64..7.0,
    ) {
        let omega = 2.0 * std::f64::consts::PI * f_ghz * 1e9;
        let params = TwoGapModelParams::single_gap(
            gamma_ne,
            microev_to_joule(delta0_uev),
            omega,
        ).unwrap();
        let t = t_mk * 1e-3;
        let total = gamma_total(t, &params);
        let reference = gamma_ne + gamma_thermal_single(t, omega, params.delta0_joule);
        prop_assert!((total - reference).abs() <= 1e-12 * reference.max(1e-300));
    }

    /// Sort-based oracle for medians and Tukey quartiles on integer data.
    #[test]
    fn median_and_quartiles_match_sort_oracle(values in prop::collection::vec(-50i32..50, 1..40)) {
        let as_f64: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let mut sorted = as_f64.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let n = sorted.len();
        let oracle_median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        prop_assert_eq!(qpt_core::cohort::median(&as_f64), oracle_median);

        let half = n / 2 + n % 2;
        let lower = &sorted[..half];
        let upper = &sorted[n - half..];
        let med = |s: &[f64]| {
            let m = s.len();
            if m % 2 == 1 { s[m / 2] } else { (s[m / 2 - 1] + s[m / 2]) / 2.0 }
        };
        let (q1, q3) = qpt_core::cohort::quartiles(&as_f64);
        prop_assert_eq!(q1, med(lower));
        prop_assert_eq!(q3, med(upper));
    }

    /// Trace text and JSON formats round-trip bit-exactly for what they
    /// store.
    #[test]
    fn trace_formats_round_trip(
        gamma in 0.0f64..300.0,
        fs in 100.0f64..1e4,
        n in 2usize..600,
        seed in any::<u64>(),
        discarded in any::<bool>(),
    ) {
        let mut trace = telegraph(gamma, fs, n, seed);
        trace.discarded = discarded;
        if discarded {
            trace.discard_reason = qpt_core::DiscardReason::ChargeDrift;
        }
        let text_back = trace_from_text(&trace_to_text(&trace)).unwrap();
        prop_assert_eq!(&text_back.values, &trace.values);
        prop_assert_eq!(text_back.dt.to_bits(), trace.dt.to_bits());
        prop_assert_eq!(text_back.seed, trace.seed);
        prop_assert_eq!(text_back.discarded, trace.discarded);
        prop_assert_eq!(text_back.discard_reason, trace.discard_reason);

        let json_back = trace_from_json(&trace_to_json(&trace).unwrap()).unwrap();
        prop_assert_eq!(json_back, trace);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Fitted rates are invariant under an overall PSD rescaling.
    #[test]
    fn lorentzian_rate_is_scale_invariant(
        gamma in 5.0f64..100.0,
        scale in 1e-3f64..1e3,
        seed in any::<u64>(),
    ) {
        let trace = telegraph(gamma, 2e3, 1 << 16, seed);
        let psd = estimate_psd(&trace, 2048, Window::Rectangular).unwrap();
        let base = fit_lorentzian(&psd).unwrap();
        let mut scaled = psd.clone();
        for p in &mut scaled.power {
            *p *= scale;
        }
        let refit = fit_lorentzian(&scaled).unwrap();
        prop_assert!(
            (base.gamma_hz - refit.gamma_hz).abs() / base.gamma_hz < 1e-9,
            "{} vs {}", base.gamma_hz, refit.gamma_hz
        );
    }

    /// Flipping every parity sign leaves the extracted rate untouched.
    #[test]
    fn parity_sign_convention_does_not_matter(
        gamma in 5.0f64..100.0,
        seed in any::<u64>(),
    ) {
        let trace = telegraph(gamma, 2e3, 1 << 16, seed);
        let mut flipped = trace.clone();
        for v in &mut flipped.values {
            *v = -*v;
        }
        let a = fit_lorentzian(&estimate_psd(&trace, 2048, Window::Rectangular).unwrap()).unwrap();
        let b = fit_lorentzian(&estimate_psd(&flipped, 2048, Window::Rectangular).unwrap()).unwrap();
        prop_assert_eq!(a.gamma_hz.to_bits(), b.gamma_hz.to_bits());
    }
}
