//! Significance of periodogram peaks.
//!
//! Series with lag-1 memory ("Markov persistence") are judged against an
//! AR(1) red-noise continuum. Series without it are checked for hidden
//! periodicity with Fisher's g test and the Kolmogorov–Smirnov test on the
//! cumulative periodogram. Both white-noise tests need the unpadded,
//! unwindowed periodogram at the Fourier frequencies, where the ordinates of
//! Gaussian white noise are i.i.d. exponential.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::autocorr::AutocorrFunction;
use crate::error::{Error, Result};
use crate::periodogram::{fft_periodogram, Method, Padding, Periodogram, Window};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Degrees of freedom of a raw spectral ordinate.
pub const RAW_DOF: f64 = 2.0;
/// Degrees of freedom used for three-point smoothed BT estimates.
pub const SMOOTHED_DOF: f64 = 2.67;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    MarkovRedNoise,
    WhiteNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    #[default]
    Auto,
    Markov,
    White,
}

impl std::str::FromStr for RegimeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(RegimeChoice::Auto),
            "markov" => Ok(RegimeChoice::Markov),
            "white" => Ok(RegimeChoice::White),
            other => Err(Error::invalid(format!("unknown regime '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub regime: Regime,
    /// Per-bin confidence level of the assessed spectrum (red-noise regime).
    pub red_noise_level: Option<Vec<f64>>,
    pub fisher: Option<TestOutcome>,
    pub ks: Option<TestOutcome>,
    pub alpha: f64,
    pub confidence: f64,
}

impl SignificanceResult {
    /// Whether any bin of `spectrum` inside `[f_lo, f_hi]` is significant.
    ///
    /// In the red-noise regime this compares power with the stored level
    /// (which must belong to `spectrum`). In the white-noise regime the tests
    /// are global: the band is significant iff either test rejected.
    pub fn band_is_significant(&self, spectrum: &Periodogram, f_lo: f64, f_hi: f64) -> bool {
        match self.regime {
            Regime::MarkovRedNoise => match &self.red_noise_level {
                Some(level) => spectrum
                    .frequencies
                    .iter()
                    .zip(&spectrum.power)
                    .zip(level)
                    .any(|((&f, &p), &l)| f >= f_lo && f <= f_hi && p > l),
                None => false,
            },
            Regime::WhiteNoise => {
                self.fisher.is_some_and(|t| t.reject) || self.ks.is_some_and(|t| t.reject)
            }
        }
    }
}

/// `c_1 > 2/√N`.
pub fn detect_markov_persistence(acf: &AutocorrFunction) -> bool {
    acf.at(1) > 2.0 / (acf.n_samples() as f64).sqrt()
}

/// Normalized AR(1) spectral shape at frequency `f` (cycles per sample).
pub fn markov_continuum(r: f64, f: f64) -> f64 {
    (1.0 - r * r) / (1.0 + r * r - 2.0 * r * (2.0 * PI * f).cos())
}

/// Red-noise confidence level per bin, with degrees of freedom inferred from
/// the spectrum's method.
pub fn red_noise_level(
    acf: &AutocorrFunction,
    spectrum: &Periodogram,
    confidence: f64,
) -> Result<Vec<f64>> {
    let dof = match spectrum.method {
        Method::BtSmoothed => SMOOTHED_DOF,
        Method::BtRaw | Method::Fft => RAW_DOF,
    };
    red_noise_level_with_dof(acf, spectrum, confidence, dof)
}

/// Red-noise level: the AR(1) continuum with `r = c_1`, scaled to the mean
/// power of `spectrum`, times `χ²_ν(confidence)/ν`.
pub fn red_noise_level_with_dof(
    acf: &AutocorrFunction,
    spectrum: &Periodogram,
    confidence: f64,
    dof: f64,
) -> Result<Vec<f64>> {
    let r = acf.at(1);
    if !(r.abs() < 1.0) {
        return Err(Error::InvalidAutocorrelation(r));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    if spectrum.is_empty() {
        return Err(Error::invalid("empty spectrum"));
    }
    let chi = ChiSquared::new(dof).map_err(|e| Error::invalid(e.to_string()))?;
    let factor = chi.inverse_cdf(confidence) / dof;

    let shape: Vec<f64> = spectrum
        .frequencies
        .iter()
        .map(|&f| markov_continuum(r, f))
        .collect();
    let shape_mean = shape.iter().sum::<f64>() / shape.len() as f64;
    let scale = spectrum.mean_power() / shape_mean;
    Ok(shape.into_iter().map(|s| s * scale * factor).collect())
}

/// Ordinates at Fourier frequencies strictly between 0 and 1/2.
fn fourier_ordinates(spectrum: &Periodogram) -> Result<Vec<f64>> {
    if !spectrum.is_fourier_grid() {
        return Err(Error::invalid(
            "white-noise tests need the unpadded, unwindowed FFT periodogram",
        ));
    }
    let ords: Vec<f64> = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.power)
        .filter(|(&f, _)| f < 0.5)
        .map(|(_, &p)| p)
        .collect();
    if ords.len() < 4 {
        return Err(Error::invalid(format!(
            "need at least 4 Fourier frequencies, have {}",
            ords.len()
        )));
    }
    Ok(ords)
}

/// `P(G > g)` for Fisher's statistic over `q` ordinates.
pub fn fisher_p_value(g: f64, q: usize) -> f64 {
    if g <= 0.0 {
        return 1.0;
    }
    if g >= 1.0 {
        return 0.0;
    }
    let qf = q as f64;
    let terms = (1.0 / g).floor() as usize;
    let mut sum = 0.0;
    let mut largest: f64 = 0.0;
    let mut ln_binom = 0.0;
    for j in 1..=terms.min(q) {
        ln_binom += ((q - j + 1) as f64).ln() - (j as f64).ln();
        let base = 1.0 - j as f64 * g;
        if base <= 0.0 {
            break;
        }
        let term = (ln_binom + (qf - 1.0) * base.ln()).exp();
        largest = largest.max(term);
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-17 * sum.abs().max(1e-300) && j > 1 {
            break;
        }
    }
    if largest > 1e8 {
        // alternating series loses precision here; p is close to one and
        // the independent-maximum form is accurate
        let tail = (1.0 - g).powf(qf - 1.0);
        return (1.0 - (1.0 - tail).powf(qf)).clamp(0.0, 1.0);
    }
    sum.clamp(0.0, 1.0)
}

/// Fisher's g test for a hidden periodicity of unspecified frequency.
pub fn fisher_test(spectrum: &Periodogram, alpha: f64) -> Result<TestOutcome> {
    let ords = fourier_ordinates(spectrum)?;
    let total: f64 = ords.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateSeries("periodogram has no power".into()));
    }
    let g = ords.iter().cloned().fold(f64::MIN, f64::max) / total;
    let p_value = fisher_p_value(g, ords.len());
    Ok(TestOutcome {
        statistic: g,
        p_value,
        reject: p_value < alpha,
    })
}

/// Survival function of the Kolmogorov distribution, `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        let mut s = 0.0;
        for j in 1..=20 {
            let k = (2 * j - 1) as f64;
            s += (-k * k * PI * PI / (8.0 * x * x)).exp();
        }
        (1.0 - (2.0 * PI).sqrt() / x * s).clamp(0.0, 1.0)
    } else {
        let mut s = 0.0;
        for j in 1..=100 {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * x * x).exp();
            s += if j % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Kolmogorov–Smirnov test of the normalized cumulative periodogram against
/// the uniform diagonal. With `q` ordinates the partial sums `Y_1..Y_{q-1}`
/// are compared with the order statistics of `q - 1` uniforms; the p-value
/// uses Stephens' small-sample scaling of the asymptotic distribution.
pub fn ks_white_noise_test(spectrum: &Periodogram, alpha: f64) -> Result<TestOutcome> {
    let ords = fourier_ordinates(spectrum)?;
    let total: f64 = ords.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateSeries("periodogram has no power".into()));
    }
    let n = ords.len() - 1;
    let nf = n as f64;
    let mut acc = 0.0;
    let mut d: f64 = 0.0;
    for (i, p) in ords[..n].iter().enumerate() {
        acc += p;
        let y = acc / total;
        let i = (i + 1) as f64;
        d = d.max(i / nf - y).max(y - (i - 1.0) / nf);
    }
    let root = nf.sqrt();
    let p_value = kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
    Ok(TestOutcome {
        statistic: d,
        p_value,
        reject: p_value < alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceOptions {
    pub regime: RegimeChoice,
    pub alpha: f64,
    pub confidence: f64,
}

impl Default for SignificanceOptions {
    fn default() -> Self {
        Self {
            regime: RegimeChoice::Auto,
            alpha: DEFAULT_ALPHA,
            confidence: DEFAULT_CONFIDENCE,
        }
    }
}

/// Choose the regime and run the matching machinery.
///
/// `spectrum` is the periodogram whose bins are judged in the red-noise
/// regime. The white-noise tests build their own Fourier-grid periodogram
/// from `values`.
pub fn assess(
    values: &[f64],
    acf: &AutocorrFunction,
    spectrum: &Periodogram,
    opts: &SignificanceOptions,
) -> Result<SignificanceResult> {
    let regime = match opts.regime {
        RegimeChoice::Markov => Regime::MarkovRedNoise,
        RegimeChoice::White => Regime::WhiteNoise,
        RegimeChoice::Auto if detect_markov_persistence(acf) => Regime::MarkovRedNoise,
        RegimeChoice::Auto => Regime::WhiteNoise,
    };
    log::info!("significance regime: {regime:?} (c_1 = {:.4})", acf.at(1));

    let mut result = SignificanceResult {
        regime,
        red_noise_level: None,
        fisher: None,
        ks: None,
        alpha: opts.alpha,
        confidence: opts.confidence,
    };
    match regime {
        Regime::MarkovRedNoise => {
            result.red_noise_level = Some(red_noise_level(acf, spectrum, opts.confidence)?);
        }
        Regime::WhiteNoise => {
            let fourier = fft_periodogram(values, Window::None, Padding::None)?;
            result.fisher = Some(fisher_test(&fourier, opts.alpha)?);
            result.ks = Some(ks_white_noise_test(&fourier, opts.alpha)?);
        }
    }
    Ok(result)
}
