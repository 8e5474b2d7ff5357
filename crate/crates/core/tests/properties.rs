use alias_scope::de::{ds_indices, evaluate_conditions, partition_lags};
use alias_scope::maxima::{local_maxima_above, spacing_report};
use alias_scope::periodogram::{bt_smoothed, fft_periodogram, Padding, Window};
use alias_scope::series::aggregate_to_rotation;
use alias_scope::significance::{fisher_test, ks_white_noise_test};
use alias_scope::{
    autocorrelation, detrend, diagnose_peak, running_mean, EdgePolicy, SignalSpec, Spacing,
    TimeSeries, Verdict,
};
use proptest::prelude::*;

fn series_strategy(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, min..max)
}

fn padded(values: &[f64], half: usize) -> TimeSeries {
    let n = values.len();
    TimeSeries::new(values[half..n - half].to_vec(), Spacing::Day)
        .unwrap()
        .with_padding(values[..half].to_vec(), values[n - half..].to_vec())
        .unwrap()
}

fn not_flat(v: &[f64]) -> bool {
    v.iter().any(|x| (x - v[0]).abs() > 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn running_mean_is_linear(
        xy in (40usize..120).prop_flat_map(|n| (series_strategy(n, n + 1), series_strategy(n, n + 1))),
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
        half in 1usize..8,
    ) {
        let (x, y) = xy;
        let w = 2 * half + 1;
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = running_mean(&padded(&combo, half), w, EdgePolicy::RequirePadding).unwrap();
        let rx = running_mean(&padded(&x, half), w, EdgePolicy::RequirePadding).unwrap();
        let ry = running_mean(&padded(&y, half), w, EdgePolicy::RequirePadding).unwrap();
        for i in 0..lhs.len() {
            let rhs = a * rx.values()[i] + b * ry.values()[i];
            let scale = 1.0f64.max(a.abs() * 100.0 + b.abs() * 100.0);
            prop_assert!((lhs.values()[i] - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn detrend_plus_mean_reconstructs(x in series_strategy(30, 100), half in 1usize..6, pad in any::<bool>()) {
        let w = 2 * half + 1;
        let (series, policy) = if pad {
            (padded(&x, half), EdgePolicy::RequirePadding)
        } else {
            (TimeSeries::new(x.clone(), Spacing::Day).unwrap(), EdgePolicy::Truncate)
        };
        let fluct = detrend(&series, w, policy).unwrap();
        let mean = running_mean(&series, w, policy).unwrap();
        let offset = (fluct.start_label - series.start_label()) as usize;
        for i in 0..fluct.len() {
            let x = series.values()[offset + i];
            prop_assert!((fluct.values()[i] + mean.values()[i] - x).abs() <= 4.0 * f64::EPSILON * 100.0);
        }
    }

    #[test]
    fn rotation_blocks_keep_the_mean(blocks in 1usize..12, len in 1usize..30, seed in any::<u64>()) {
        let x = alias_scope::synthesize(&SignalSpec::new(blocks * len, seed).white(3.0)).unwrap();
        let rot = aggregate_to_rotation(&x, len as f64).unwrap();
        prop_assert_eq!(rot.len(), blocks);
        let m0 = x.mean();
        prop_assert!((rot.mean() - m0).abs() <= 1e-12 * m0.abs().max(1.0));
    }

    #[test]
    fn acf_ignores_affine_maps_and_reversal(x in series_strategy(30, 120), a in 0.1f64..10.0, neg in any::<bool>(), b in -50.0f64..50.0) {
        prop_assume!(not_flat(&x));
        let m = x.len() / 3;
        let a = if neg { -a } else { a };
        let base = autocorrelation(&x, m).unwrap();
        let mapped: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        let mapped = autocorrelation(&mapped, m).unwrap();
        let rev = autocorrelation(&rev, m).unwrap();
        for tau in 0..=m {
            prop_assert!((mapped.at(tau) - base.at(tau)).abs() < 1e-9);
            prop_assert!((rev.at(tau) - base.at(tau)).abs() < 1e-12);
        }
    }

    #[test]
    fn smoothing_stays_inside_neighbourhood(x in series_strategy(3, 60)) {
        let s = bt_smoothed(&x).unwrap();
        let n = x.len();
        for i in 0..n {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            let win = &x[lo..=hi];
            let min = win.iter().copied().fold(f64::INFINITY, f64::min);
            let max = win.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(s[i] >= min - 1e-12 && s[i] <= max + 1e-12);
        }
    }

    #[test]
    fn fft_power_survives_reversal(x in series_strategy(8, 200), hamming in any::<bool>()) {
        let window = if hamming { Window::Hamming } else { Window::None };
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        let a = fft_periodogram(&x, window, Padding::None).unwrap();
        let b = fft_periodogram(&rev, window, Padding::None).unwrap();
        let scale = a.power.iter().copied().fold(1.0, f64::max);
        for (p, q) in a.power.iter().zip(&b.power) {
            prop_assert!((p - q).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn white_tests_ignore_positive_scaling(seed in any::<u64>(), a in 0.01f64..100.0) {
        let x = alias_scope::synthesize(&SignalSpec::new(256, seed).white(1.0)).unwrap();
        let scaled: Vec<f64> = x.values().iter().map(|v| a * v).collect();
        let p = fft_periodogram(x.values(), Window::None, Padding::None).unwrap();
        let q = fft_periodogram(&scaled, Window::None, Padding::None).unwrap();
        let (f1, f2) = (fisher_test(&p, 0.05).unwrap(), fisher_test(&q, 0.05).unwrap());
        let (k1, k2) = (ks_white_noise_test(&p, 0.05).unwrap(), ks_white_noise_test(&q, 0.05).unwrap());
        prop_assert!((f1.statistic - f2.statistic).abs() < 1e-12);
        prop_assert!((k1.statistic - k2.statistic).abs() < 1e-12);
        prop_assert_eq!(f1.reject, f2.reject);
        prop_assert_eq!(k1.reject, k2.reject);
    }

    #[test]
    fn partition_accounts_for_every_lag(seed in any::<u64>(), k in 1usize..30) {
        let max_lag = 120;
        let x = alias_scope::synthesize(&SignalSpec::new(600, seed).ar1(0.6, 1.0).cosine(37.0, 0.5)).unwrap();
        let acf = autocorrelation(x.values(), max_lag).unwrap();
        let part = partition_lags(&acf, k).unwrap();
        let step = std::f64::consts::PI * k as f64 / max_lag as f64;
        let term = |t: usize| acf.at(t) * (step * t as f64).cos();
        let direct: f64 = (1..max_lag).map(term).sum();
        let split: f64 = [&part.a, &part.b, &part.c]
            .iter()
            .flat_map(|sets| sets.iter().flatten())
            .map(|&t| term(t))
            .sum();
        prop_assert!((2.0 * direct / max_lag as f64 - 2.0 * split / max_lag as f64).abs() < 1e-12);

        if let Ok(ds) = ds_indices(&part, &acf) {
            prop_assert!((ds.ds_plus_total + ds.ds_minus_total - 100.0).abs() < 1e-9);
            if let Ok(report) = evaluate_conditions(&ds, &part, &[]) {
                let plus: f64 = ds.ws_plus.iter().sum();
                let minus: f64 = ds.ws_minus.iter().sum();
                prop_assert_eq!(report.condition7.passed, plus > minus);
            }
        }
    }

    #[test]
    fn diagnosis_ignores_positive_scaling(seed in any::<u64>(), a in 0.001f64..1000.0, k in 2usize..20) {
        let x = alias_scope::synthesize(&SignalSpec::new(800, seed).ar1(0.8, 1.0).cosine(50.0, 1.0)).unwrap();
        let scaled: Vec<f64> = x.values().iter().map(|v| a * v).collect();
        let acf1 = autocorrelation(x.values(), 200).unwrap();
        let acf2 = autocorrelation(&scaled, 200).unwrap();
        let (p1, p2) = (partition_lags(&acf1, k).unwrap(), partition_lags(&acf2, k).unwrap());
        prop_assert_eq!(&p1, &p2);
        let r1 = diagnose_peak(x.values(), 200, k, &[]);
        let r2 = diagnose_peak(&scaled, 200, k, &[]);
        match (r1, r2) {
            (Ok(r1), Ok(r2)) => {
                prop_assert_eq!(r1.verdict, r2.verdict);
                prop_assert_eq!(r1.condition8.m, r2.condition8.m);
                for (u, v) in r1.ds.ds_plus.iter().zip(&r2.ds.ds_plus) {
                    prop_assert!((u - v).abs() < 1e-9);
                }
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "scaling changed whether the diagnosis succeeds"),
        }
    }

    #[test]
    fn raising_threshold_never_adds_samples(x in series_strategy(10, 80), p in -50.0f64..50.0, dp in 0.0f64..50.0) {
        let above = |q: f64| x.iter().filter(|&&v| v > q).count();
        prop_assert!(above(p + dp) <= above(p));
    }

    #[test]
    fn spacings_sum_to_span(mut pos in prop::collection::btree_set(-1000i64..1000, 2..30)) {
        let pos: Vec<i64> = std::mem::take(&mut pos).into_iter().collect();
        let r = spacing_report(&pos, 6.0).unwrap();
        prop_assert_eq!(r.distances.iter().sum::<i64>(), pos[pos.len() - 1] - pos[0]);
    }

    #[test]
    fn maxima_ignore_common_shift(x in series_strategy(5, 80), p in -50.0f64..50.0, c in -1000.0f64..1000.0) {
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let a = local_maxima_above(&x, 0..=x.len() - 1, p);
        let b = local_maxima_above(&shifted, 0..=x.len() - 1, p + c);
        // exact unless the shift rounds two values together
        let ties = x.windows(2).any(|w| w[0] != w[1] && w[0] + c == w[1] + c)
            || x.iter().any(|v| (v > &p) != (v + c > p + c));
        prop_assume!(!ties);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn white_noise_band_fraction_is_small() {
    let (n, m, reps) = (500, 50, 200);
    let mut outside = 0usize;
    for seed in 0..reps {
        let x = alias_scope::synthesize(&SignalSpec::new(n, seed).white(1.0)).unwrap();
        let acf = autocorrelation(x.values(), m).unwrap();
        outside += (1..=m).filter(|&t| acf.at(t).abs() > 2.0 * acf.se(t)).count();
    }
    let frac = outside as f64 / (reps as usize * m) as f64;
    assert!(frac <= 0.10, "fraction outside band {frac}");
}

#[test]
fn flat_red_level_for_zero_persistence() {
    use alias_scope::periodogram::bt_smoothed_periodogram;
    use alias_scope::significance::red_noise_level;
    use alias_scope::AutocorrFunction;
    let acf = AutocorrFunction::from_coefficients(vec![1.0, 0.0, 0.1, -0.05, 0.02], 400).unwrap();
    let bt = bt_smoothed_periodogram(&acf).unwrap();
    let level = red_noise_level(&acf, &bt, 0.95).unwrap();
    assert!(level.iter().all(|l| (l - level[0]).abs() < 1e-12));
}

/// Pure cosine with period `2M/k0`: supported at `k0`, rejected at `2k0`
/// and `3k0`.
fn harmonic_verdicts(period: f64) -> [Verdict; 3] {
    let max_lag = 1000;
    let n = (20.0 * period).ceil() as usize;
    let x = alias_scope::synthesize(&SignalSpec::new(n.max(max_lag + 1), 0).cosine(period, 1.0)).unwrap();
    let k0 = (2.0 * max_lag as f64 / period).round() as usize;
    let acf = autocorrelation(x.values(), max_lag).unwrap();
    [k0, 2 * k0, 3 * k0].map(|k| alias_scope::de::diagnose_with_acf(&acf, k, &[]).unwrap().verdict)
}

#[test]
fn harmonics_of_a_pure_cosine_are_rejected() {
    for period in [100.0, 154.0, 200.0] {
        let [_, second, third] = harmonic_verdicts(period);
        assert_eq!(second, Verdict::PeakNotTreatableAsTrue, "2k0 for period {period}");
        assert_eq!(third, Verdict::PeakNotTreatableAsTrue, "3k0 for period {period}");
    }
}

#[test]
fn pure_cosine_is_supported_at_its_own_bin() {
    for period in [100.0, 154.0, 200.0] {
        let [first, _, _] = harmonic_verdicts(period);
        assert_eq!(first, Verdict::PeakSupported, "k0 for period {period}");
    }
}
