//! Blackman–Tukey raw and smoothed estimates, the FFT periodogram, and
//! selection of the lag cutoff `M` by agreement between the two.
//!
//! The raw estimate at harmonic `k` of a lag cutoff `M` is
//!
//! ```text
//! S_k = c_0/M + (-1)^k c_M/M + (2/M) Σ_{τ=1}^{M-1} c_τ cos(πkτ/M),   k = 1..=M
//! ```
//!
//! and bin `k` is reported at the integer period `floor(2M/k)` samples.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::autocorr::{autocorrelation, AutocorrFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BtRaw,
    BtSmoothed,
    Fft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Hamming,
    None,
}

impl Window {
    /// Window coefficients for `n` samples; Hamming is `0.54 - 0.46 cos(2πi/(n-1))`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::None => vec![1.0; n],
            Window::Hamming if n == 1 => vec![1.0],
            Window::Hamming => (0..n)
                .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
                .collect(),
        }
    }
}

/// Transform length used by [`fft_periodogram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// Next power of two at least `4N`.
    #[default]
    Auto,
    /// Exact Fourier frequencies `j/N`.
    None,
    /// Zero-pad to this length (at least `N`).
    To(usize),
}

/// Spectral estimates on a frequency grid (cycles per sample).
///
/// FFT estimates are one-sided: over bins `0..=L/2` they sum to the energy
/// of the windowed, mean-removed series. Bin 0 is not stored; its power is
/// kept in `dc_power` so the balance can be checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    pub method: Method,
    pub frequencies: Vec<f64>,
    /// Period per bin, in samples. BT bins use `floor(2M/k)`.
    pub periods: Vec<f64>,
    pub power: Vec<f64>,
    /// Lag cutoff `M` (BT only).
    pub max_lag: Option<usize>,
    /// Window applied before the transform (FFT only).
    pub window: Option<Window>,
    pub n_samples: usize,
    /// Transform length `L` (FFT only).
    pub transform_len: Option<usize>,
    pub dc_power: f64,
}

impl Periodogram {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn mean_power(&self) -> f64 {
        self.power.iter().sum::<f64>() / self.power.len() as f64
    }

    /// Index of the bin with the largest power.
    pub fn peak_bin(&self) -> Option<usize> {
        self.power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }

    /// Indices of strict interior local maxima.
    pub fn local_maxima(&self) -> Vec<usize> {
        (1..self.power.len().saturating_sub(1))
            .filter(|&i| self.power[i] > self.power[i - 1] && self.power[i] > self.power[i + 1])
            .collect()
    }

    /// True when this is the unpadded, unwindowed FFT periodogram.
    pub fn is_fourier_grid(&self) -> bool {
        self.method == Method::Fft
            && self.window == Some(Window::None)
            && self.transform_len == Some(self.n_samples)
    }
}

/// Integer period `floor(2M/k)` of BT bin `k`.
pub fn bt_period(max_lag: usize, k: usize) -> usize {
    2 * max_lag / k
}

fn raw_estimate(c: &[f64], max_lag: usize, k: usize) -> f64 {
    let m = max_lag as f64;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let step = PI * k as f64 / m;
    let body: f64 = c[1..max_lag]
        .iter()
        .enumerate()
        .map(|(i, ct)| ct * (step * (i + 1) as f64).cos())
        .sum();
    c[0] / m + sign * c[max_lag] / m + 2.0 * body / m
}

/// Raw BT estimate at harmonic `k`, `1 <= k <= M`.
pub fn bt_raw(acf: &AutocorrFunction, k: usize) -> Result<f64> {
    let max_lag = acf.max_lag();
    if k == 0 || k > max_lag {
        return Err(Error::invalid(format!("harmonic k={k} outside 1..={max_lag}")));
    }
    Ok(raw_estimate(acf.coefficients(), max_lag, k))
}

/// Raw estimate at `k = 0` (infinite period). Never part of a reported
/// periodogram; exposed for the variance balance.
pub fn bt_raw_zero(acf: &AutocorrFunction) -> f64 {
    raw_estimate(acf.coefficients(), acf.max_lag(), 0)
}

/// Raw BT periodogram over `k = 1..=M`. Values are signed.
pub fn bt_raw_periodogram(acf: &AutocorrFunction) -> Periodogram {
    let max_lag = acf.max_lag();
    let power: Vec<f64> = (1..=max_lag)
        .into_par_iter()
        .map(|k| raw_estimate(acf.coefficients(), max_lag, k))
        .collect();
    bt_grid(Method::BtRaw, max_lag, power, acf.n_samples())
}

/// Smoothed BT periodogram over `k = 1..=M`.
pub fn bt_smoothed_periodogram(acf: &AutocorrFunction) -> Result<Periodogram> {
    let raw = bt_raw_periodogram(acf);
    let power = bt_smoothed(&raw.power)?;
    Ok(bt_grid(Method::BtSmoothed, acf.max_lag(), power, acf.n_samples()))
}

fn bt_grid(method: Method, max_lag: usize, power: Vec<f64>, n_samples: usize) -> Periodogram {
    let frequencies = (1..=max_lag).map(|k| k as f64 / (2 * max_lag) as f64).collect();
    let periods = (1..=max_lag).map(|k| bt_period(max_lag, k) as f64).collect();
    Periodogram {
        method,
        frequencies,
        periods,
        power,
        max_lag: Some(max_lag),
        window: None,
        n_samples,
        transform_len: None,
        dc_power: 0.0,
    }
}

/// Three-point Hanning smoothing (0.25, 0.5, 0.25); each endpoint averages
/// itself with its single neighbour at (0.5, 0.5).
pub fn bt_smoothed(raw: &[f64]) -> Result<Vec<f64>> {
    let n = raw.len();
    if n < 3 {
        return Err(Error::invalid(format!("smoothing needs at least 3 values, got {n}")));
    }
    let mut out = Vec::with_capacity(n);
    out.push(0.5 * raw[0] + 0.5 * raw[1]);
    out.extend(raw.windows(3).map(|w| 0.25 * w[0] + 0.5 * w[1] + 0.25 * w[2]));
    out.push(0.5 * raw[n - 2] + 0.5 * raw[n - 1]);
    Ok(out)
}

/// FFT periodogram of the mean-removed, windowed series.
pub fn fft_periodogram(values: &[f64], window: Window, padding: Padding) -> Result<Periodogram> {
    let n = values.len();
    if n < 8 {
        return Err(Error::invalid(format!("FFT periodogram needs N >= 8, got {n}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("series contains non-finite values"));
    }
    let len = match padding {
        Padding::Auto => (4 * n).next_power_of_two(),
        Padding::None => n,
        Padding::To(l) if l >= n => l,
        Padding::To(l) => {
            return Err(Error::invalid(format!("pad length {l} is shorter than the series ({n})")))
        }
    };

    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .zip(window.coefficients(n))
        .map(|(v, w)| Complex::new((v - mean) * w, 0.0))
        .collect();
    buf.resize(len, Complex::new(0.0, 0.0));

    FftPlanner::new().plan_fft_forward(len).process(&mut buf);

    let scale = 1.0 / len as f64;
    let half = len / 2;
    let one_sided = |j: usize| {
        let p = buf[j].norm_sqr() * scale;
        if j == 0 || 2 * j == len {
            p
        } else {
            2.0 * p
        }
    };

    let frequencies = (1..=half).map(|j| j as f64 / len as f64).collect();
    let periods = (1..=half).map(|j| len as f64 / j as f64).collect();
    let power = (1..=half).map(one_sided).collect();

    Ok(Periodogram {
        method: Method::Fft,
        frequencies,
        periods,
        power,
        max_lag: None,
        window: Some(window),
        n_samples: n,
        transform_len: Some(len),
        dc_power: one_sided(0),
    })
}

/// Default conformity threshold for [`choose_m`].
pub const CONFORMITY_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformityScore {
    pub max_lag: usize,
    /// Pearson correlation of log power; `None` with fewer than 3 usable bins.
    pub score: Option<f64>,
    /// Bins compared (positive power in both estimates, period below the cap).
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MSelection {
    pub chosen: usize,
    pub scores: Vec<ConformityScore>,
    /// No candidate reached the threshold; `chosen` is the best-scoring one.
    pub below_threshold: bool,
}

/// Pick `M` where the smoothed BT periodogram agrees with the FFT one.
///
/// For each candidate, both estimates are restricted to periods below
/// `period_cap`, the FFT power is interpolated linearly in frequency onto the
/// BT grid, and agreement is the Pearson correlation of log power over bins
/// where both are positive. The smallest candidate scoring above `threshold`
/// wins; otherwise the best score wins and `below_threshold` is set.
pub fn choose_m(
    values: &[f64],
    candidates: &[usize],
    period_cap: f64,
    threshold: f64,
) -> Result<MSelection> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidate M values"));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&m| m == 0 || m >= values.len()) {
        return Err(Error::invalid(format!(
            "candidate M={bad} must lie in 1..{}",
            values.len()
        )));
    }
    if sorted.len() == 1 {
        return Ok(MSelection {
            chosen: sorted[0],
            scores: vec![conformity(values, sorted[0], period_cap, None)?],
            below_threshold: false,
        });
    }

    let fft = fft_periodogram(values, Window::Hamming, Padding::Auto)?;
    let scores = sorted
        .iter()
        .map(|&m| conformity(values, m, period_cap, Some(&fft)))
        .collect::<Result<Vec<_>>>()?;

    let passing = scores
        .iter()
        .find(|s| s.score.is_some_and(|v| v > threshold));
    let selection = match passing {
        Some(s) => MSelection {
            chosen: s.max_lag,
            scores: scores.clone(),
            below_threshold: false,
        },
        None => {
            let best = scores
                .iter()
                .filter_map(|s| s.score.map(|v| (s.max_lag, v)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(m, _)| m)
                .unwrap_or(sorted[0]);
            log::warn!("no candidate M reached conformity {threshold}; using M={best}");
            MSelection {
                chosen: best,
                scores: scores.clone(),
                below_threshold: true,
            }
        }
    };
    Ok(selection)
}

fn conformity(
    values: &[f64],
    max_lag: usize,
    period_cap: f64,
    fft: Option<&Periodogram>,
) -> Result<ConformityScore> {
    let owned;
    let fft = match fft {
        Some(f) => f,
        None => {
            owned = fft_periodogram(values, Window::Hamming, Padding::Auto)?;
            &owned
        }
    };
    let acf = autocorrelation(values, max_lag)?;
    let bt = bt_smoothed_periodogram(&acf)?;

    let (xs, ys): (Vec<f64>, Vec<f64>) = bt
        .frequencies
        .iter()
        .zip(&bt.periods)
        .zip(&bt.power)
        .filter(|((_, &p), _)| p < period_cap)
        .filter_map(|((&f, _), &b)| {
            let a = interpolate(&fft.frequencies, &fft.power, f)?;
            (a > 0.0 && b > 0.0).then(|| (b.ln(), a.ln()))
        })
        .unzip();

    let bins = xs.len();
    let score = if bins < 3 { None } else { pearson(&xs, &ys) };
    Ok(ConformityScore {
        max_lag,
        score,
        bins,
    })
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> Option<f64> {
    let hi = grid.partition_point(|&g| g < x);
    if hi == 0 {
        return (grid.first() == Some(&x)).then(|| values[0]);
    }
    if hi == grid.len() {
        return None;
    }
    let lo = hi - 1;
    let t = (x - grid[lo]) / (grid[hi] - grid[lo]);
    Some(values[lo] + t * (values[hi] - values[lo]))
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    let denom = (sxx * syy).sqrt();
    (denom > 0.0).then(|| sxy / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synthesize, SignalSpec};
    use approx::assert_relative_eq;

    fn cosine(n: usize, period: f64) -> Vec<f64> {
        (0..n).map(|t| (2.0 * PI * t as f64 / period).cos()).collect()
    }

    #[test]
    fn idealized_white_acf_leaves_first_term() {
        let mut c = vec![0.0; 101];
        c[0] = 1.0;
        let acf = AutocorrFunction::from_coefficients(c, 1000).unwrap();
        assert_relative_eq!(bt_raw(&acf, 7).unwrap(), 0.01, epsilon = 1e-15);
    }

    #[test]
    fn matched_cosine_acf_concentrates_at_its_harmonic() {
        let (m, k0) = (200usize, 10usize);
        let c: Vec<f64> = (0..=m)
            .map(|t| (PI * (k0 * t) as f64 / m as f64).cos())
            .collect();
        let acf = AutocorrFunction::from_coefficients(c.clone(), 1000).unwrap();
        let mut expect = c[0] / m as f64 + c[m] / m as f64;
        for t in 1..m {
            let v = (PI * (k0 * t) as f64 / m as f64).cos();
            expect += 2.0 * c[t] * v / m as f64;
        }
        assert_relative_eq!(bt_raw(&acf, k0).unwrap(), expect, epsilon = 1e-12);
        assert_relative_eq!(bt_raw(&acf, k0).unwrap(), 1.0, epsilon = 1e-12);
        assert!(bt_raw(&acf, k0 + 3).unwrap().abs() < 0.02);
    }

    #[test]
    fn k_out_of_range() {
        let acf = AutocorrFunction::from_coefficients(vec![1.0, 0.2, 0.1], 10).unwrap();
        assert!(bt_raw(&acf, 0).is_err());
        assert!(bt_raw(&acf, 3).is_err());
        assert!(bt_raw(&acf, 2).is_ok());
    }

    #[test]
    fn bt_grid_uses_integer_periods() {
        let x = synthesize(&SignalSpec::new(3653, 1).white(1.0)).unwrap();
        let acf = autocorrelation(x.values(), 1000).unwrap();
        let p = bt_raw_periodogram(&acf);
        assert_eq!(&p.periods[..7], &[2000.0, 1000.0, 666.0, 500.0, 400.0, 333.0, 285.0]);
        assert_eq!(p.periods[12], 153.0);
        assert_eq!(p.len(), 1000);
    }

    #[test]
    fn smoothing_examples() {
        assert_eq!(bt_smoothed(&[2.0; 6]).unwrap(), vec![2.0; 6]);
        assert_eq!(bt_smoothed(&[0.0, 1.0, 0.0]).unwrap(), vec![0.5, 0.5, 0.5]);
        let mut impulse = vec![0.0; 9];
        impulse[4] = 1.0;
        assert_eq!(
            bt_smoothed(&impulse).unwrap(),
            vec![0.0, 0.0, 0.0, 0.25, 0.5, 0.25, 0.0, 0.0, 0.0]
        );
        assert!(bt_smoothed(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn fft_peak_at_known_period() {
        let p = fft_periodogram(&cosine(3653, 154.0), Window::Hamming, Padding::Auto).unwrap();
        assert_eq!(p.transform_len, Some(16384));
        let peak = p.periods[p.peak_bin().unwrap()];
        assert!((peak - 154.0).abs() <= 2.0, "peak period {peak}");
    }

    #[test]
    fn fft_of_zero_series_is_zero() {
        let p = fft_periodogram(&[0.0; 64], Window::Hamming, Padding::Auto).unwrap();
        assert!(p.power.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fft_two_tones() {
        let x: Vec<f64> = cosine(3653, 450.0)
            .iter()
            .zip(cosine(3653, 90.0))
            .map(|(a, b)| a + b)
            .collect();
        let p = fft_periodogram(&x, Window::Hamming, Padding::Auto).unwrap();
        let mut maxima = p.local_maxima();
        maxima.sort_by(|&a, &b| p.power[b].total_cmp(&p.power[a]));
        let mut top: Vec<f64> = maxima[..2].iter().map(|&i| p.periods[i]).collect();
        top.sort_by(f64::total_cmp);
        assert!((top[0] - 90.0).abs() < 1.0, "{top:?}");
        assert!((top[1] - 450.0).abs() < 10.0, "{top:?}");
    }

    #[test]
    fn fft_power_balances_energy() {
        let x = synthesize(&SignalSpec::new(300, 9).ar1(0.4, 1.0)).unwrap();
        for (window, padding) in [
            (Window::Hamming, Padding::Auto),
            (Window::None, Padding::None),
            (Window::None, Padding::To(301)),
        ] {
            let p = fft_periodogram(x.values(), window, padding).unwrap();
            let mean = x.mean();
            let energy: f64 = x
                .values()
                .iter()
                .zip(window.coefficients(300))
                .map(|(v, w)| ((v - mean) * w).powi(2))
                .sum();
            let total = p.dc_power + p.power.iter().sum::<f64>();
            assert_relative_eq!(total, energy, max_relative = 1e-10);
        }
    }

    #[test]
    fn fft_input_validation() {
        assert!(fft_periodogram(&[1.0; 7], Window::None, Padding::None).is_err());
        assert!(fft_periodogram(&[1.0; 16], Window::None, Padding::To(8)).is_err());
        let p = fft_periodogram(&[1.0, 0.0, 2.0, 5.0, 1.0, 3.0, 2.0, 1.0], Window::None, Padding::None)
            .unwrap();
        assert!(p.is_fourier_grid());
        assert_eq!(p.frequencies, vec![0.125, 0.25, 0.375, 0.5]);
    }

    #[test]
    fn choose_m_on_sinusoid_takes_smallest() {
        let n = 3653;
        let x = cosine(n, 154.0);
        let candidates = [n / 10, n / 5, n / 3];
        let sel = choose_m(&x, &candidates, 166.0, CONFORMITY_THRESHOLD).unwrap();
        for s in &sel.scores {
            assert!(s.score.unwrap() > 0.9, "{s:?}");
        }
        assert_eq!(sel.chosen, n / 10);
        assert!(!sel.below_threshold);
    }

    #[test]
    fn choose_m_on_white_noise_flags() {
        let x = synthesize(&SignalSpec::new(2000, 4).white(1.0)).unwrap();
        let sel = choose_m(x.values(), &[100, 300, 600], 50.0, CONFORMITY_THRESHOLD).unwrap();
        assert!(sel.below_threshold);
        let best = sel
            .scores
            .iter()
            .max_by(|a, b| a.score.unwrap().total_cmp(&b.score.unwrap()))
            .unwrap();
        assert_eq!(sel.chosen, best.max_lag);
    }

    #[test]
    fn choose_m_singleton_and_empty() {
        let x = cosine(500, 20.0);
        assert_eq!(choose_m(&x, &[120], 50.0, 0.9).unwrap().chosen, 120);
        assert!(choose_m(&x, &[], 50.0, 0.9).is_err());
        assert!(choose_m(&x, &[500], 50.0, 0.9).is_err());
    }
}
