//! Normalized sample autocorrelation with a per-lag standard-error band.
//!
//! The lag-`τ` coefficient uses a `1/(N-τ)` numerator over a `1/N`
//! variance, with the mean taken once over the whole series:
//!
//! ```text
//! c_τ = [ 1/(N-τ) Σ_{i<N-τ} (x_i - x̄)(x_{i+τ} - x̄) ] / [ 1/N Σ (x_i - x̄)² ]
//! ```
//!
//! This is not the biased `1/N` estimator, so `|c_τ|` may exceed one at lags
//! close to `N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed above `|c| = 1` when validating supplied coefficients.
pub const UNIT_BOUND_EPS: f64 = 1e-9;

/// How the standard error of `c_τ` is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandPolicy {
    /// `se_τ = sqrt((1 + 2 Σ_{u<τ} c_u²) / N)`.
    #[default]
    Bartlett,
    /// `se_τ = 1/√N` at every lag.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocorrFunction {
    /// `c[τ]` for `τ = 0..=M`; `c[0] == 1`.
    c: Vec<f64>,
    n_samples: usize,
    /// `se[τ - 1]` for `τ = 1..=M`.
    se: Vec<f64>,
    band: BandPolicy,
}

impl AutocorrFunction {
    /// Build from known coefficients, e.g. an idealized or published ACF.
    pub fn from_coefficients(c: Vec<f64>, n_samples: usize) -> Result<Self> {
        if c.len() < 2 {
            return Err(Error::invalid("need at least c_0 and c_1"));
        }
        if c[0] != 1.0 {
            return Err(Error::invalid(format!("c_0 must equal 1, got {}", c[0])));
        }
        if let Some(t) = c.iter().position(|v| !v.is_finite() || v.abs() > 1.0 + UNIT_BOUND_EPS) {
            return Err(Error::invalid(format!("c_{t} = {} is outside [-1, 1]", c[t])));
        }
        Self::assemble(c, n_samples, BandPolicy::Bartlett)
    }

    fn assemble(c: Vec<f64>, n_samples: usize, band: BandPolicy) -> Result<Self> {
        let max_lag = c.len() - 1;
        if max_lag >= n_samples {
            return Err(Error::invalid(format!(
                "max lag {max_lag} must be smaller than the sample size {n_samples}"
            )));
        }
        let se = band_errors(&c, n_samples, band);
        Ok(Self {
            c,
            n_samples,
            se,
            band,
        })
    }

    /// Recompute the band under a different policy.
    pub fn with_band(mut self, band: BandPolicy) -> Self {
        self.se = band_errors(&self.c, self.n_samples, band);
        self.band = band;
        self
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn at(&self, lag: usize) -> f64 {
        self.c[lag]
    }

    pub fn max_lag(&self) -> usize {
        self.c.len() - 1
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn band(&self) -> BandPolicy {
        self.band
    }

    /// Standard errors for `τ = 1..=M`.
    pub fn standard_errors(&self) -> &[f64] {
        &self.se
    }

    /// Standard error at lag `τ >= 1`.
    pub fn se(&self, lag: usize) -> f64 {
        self.se[lag - 1]
    }
}

fn band_errors(c: &[f64], n: usize, band: BandPolicy) -> Vec<f64> {
    let n = n as f64;
    let max_lag = c.len() - 1;
    match band {
        BandPolicy::Constant => vec![1.0 / n.sqrt(); max_lag],
        BandPolicy::Bartlett => {
            let mut acc = 0.0;
            (1..=max_lag)
                .map(|tau| {
                    let se = ((1.0 + 2.0 * acc) / n).sqrt();
                    acc += c[tau] * c[tau];
                    se
                })
                .collect()
        }
    }
}

/// Bartlett standard errors `se_τ`, `τ = 1..=M`.
pub fn autocorr_standard_errors(acf: &AutocorrFunction) -> Vec<f64> {
    band_errors(&acf.c, acf.n_samples, BandPolicy::Bartlett)
}

/// Sample autocorrelation for lags `0..=max_lag`.
pub fn autocorrelation(values: &[f64], max_lag: usize) -> Result<AutocorrFunction> {
    let n = values.len();
    if max_lag == 0 {
        return Err(Error::invalid("max lag must be positive"));
    }
    if max_lag >= n {
        return Err(Error::invalid(format!(
            "max lag {max_lag} must be smaller than the series length {n}"
        )));
    }
    if 3 * max_lag >= n {
        log::warn!("max lag {max_lag} is not below N/3 = {}; estimates at large lags are noisy", n / 3);
    }

    let mean = values.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let variance = centred.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if !(variance > 0.0) {
        return Err(Error::DegenerateSeries("series has zero variance".into()));
    }

    let c: Vec<f64> = (0..=max_lag)
        .into_par_iter()
        .map(|tau| {
            if tau == 0 {
                return 1.0;
            }
            let len = n - tau;
            let cov: f64 = centred[..len]
                .iter()
                .zip(&centred[tau..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / len as f64;
            cov / variance
        })
        .collect();

    AutocorrFunction::assemble(c, n, BandPolicy::Bartlett)
}

/// `c_τ > 2 se_τ`, using the band stored in `acf`.
pub fn is_significantly_positive(acf: &AutocorrFunction, lag: usize) -> Result<bool> {
    if lag == 0 || lag > acf.max_lag() {
        return Err(Error::invalid(format!(
            "lag {lag} outside 1..={}",
            acf.max_lag()
        )));
    }
    Ok(acf.at(lag) > 2.0 * acf.se(lag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alternating_series() {
        let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let acf = autocorrelation(&x, 3).unwrap();
        assert_relative_eq!(acf.at(0), 1.0);
        assert_relative_eq!(acf.at(1), -1.0, epsilon = 1e-12);
        assert_relative_eq!(acf.at(2), 1.0, epsilon = 1e-12);
        assert_relative_eq!(acf.at(3), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert!(matches!(
            autocorrelation(&[3.0; 20], 4),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn lag_must_be_below_length() {
        let x = [1.0, 2.0, 3.0, 1.0];
        assert!(autocorrelation(&x, 4).is_err());
        assert!(autocorrelation(&x, 0).is_err());
        assert!(autocorrelation(&x, 3).is_ok());
    }

    #[test]
    fn cosine_acf_follows_cosine() {
        let x: Vec<f64> = (0..5000)
            .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 100.0).cos())
            .collect();
        let acf = autocorrelation(&x, 300).unwrap();
        for tau in 0..=300 {
            let expect = (2.0 * std::f64::consts::PI * tau as f64 / 100.0).cos();
            assert!((acf.at(tau) - expect).abs() < 0.02, "tau {tau}");
        }
    }

    #[test]
    fn first_standard_error_is_inverse_root_n() {
        let acf = AutocorrFunction::from_coefficients(vec![1.0, 0.6, 0.1], 100).unwrap();
        assert_relative_eq!(acf.se(1), 0.1, epsilon = 1e-15);
        assert_relative_eq!(acf.se(2), (1.72f64 / 100.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(acf.se(2), 0.1311, epsilon = 1e-4);
        assert_eq!(autocorr_standard_errors(&acf), acf.standard_errors());

        let flat = acf.with_band(BandPolicy::Constant);
        assert_relative_eq!(flat.se(2), 0.1);
    }

    #[test]
    fn significance_of_small_coefficients() {
        // southern-hemisphere rotation case: c = 0.02 with N = 136
        let acf = AutocorrFunction::from_coefficients(vec![1.0, 0.02], 136).unwrap();
        assert_relative_eq!(acf.se(1), 0.0857, epsilon = 1e-4);
        assert!(!is_significantly_positive(&acf, 1).unwrap());

        let acf = AutocorrFunction::from_coefficients(vec![1.0, 0.0], 136).unwrap();
        assert!(!is_significantly_positive(&acf, 1).unwrap());

        let acf = AutocorrFunction::from_coefficients(vec![1.0, 0.5], 400).unwrap();
        assert!(is_significantly_positive(&acf, 1).unwrap());

        assert!(is_significantly_positive(&acf, 0).is_err());
        assert!(is_significantly_positive(&acf, 2).is_err());
    }

    #[test]
    fn supplied_coefficients_are_validated() {
        assert!(AutocorrFunction::from_coefficients(vec![0.9, 0.1], 10).is_err());
        assert!(AutocorrFunction::from_coefficients(vec![1.0, 1.5], 10).is_err());
        assert!(AutocorrFunction::from_coefficients(vec![1.0, 0.1, 0.1], 2).is_err());
    }
}
