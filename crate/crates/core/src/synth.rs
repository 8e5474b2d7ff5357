//! Deterministic test signals: sinusoids plus AR(1) noise plus a trend.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Spacing, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sinusoid {
    /// Period in samples.
    pub period: f64,
    pub amplitude: f64,
    /// Phase in radians; the component is `amplitude * cos(2πt/period + phase)`.
    #[serde(default)]
    pub phase: f64,
}

/// First-order autoregressive noise `e_t = r e_{t-1} + amplitude * z_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArNoise {
    pub r: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    #[serde(default)]
    pub linear: f64,
    #[serde(default)]
    pub quadratic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub components: Vec<Sinusoid>,
    #[serde(default)]
    pub noise: Option<ArNoise>,
    #[serde(default)]
    pub trend: Option<Trend>,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Day
}

impl SignalSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            components: Vec::new(),
            noise: None,
            trend: None,
            spacing: Spacing::Day,
        }
    }

    pub fn cosine(mut self, period: f64, amplitude: f64) -> Self {
        self.components.push(Sinusoid {
            period,
            amplitude,
            phase: 0.0,
        });
        self
    }

    pub fn ar1(mut self, r: f64, amplitude: f64) -> Self {
        self.noise = Some(ArNoise { r, amplitude });
        self
    }

    pub fn white(self, amplitude: f64) -> Self {
        self.ar1(0.0, amplitude)
    }
}

/// Generate the series described by `spec`.
pub fn synthesize(spec: &SignalSpec) -> Result<TimeSeries> {
    if spec.n == 0 {
        return Err(Error::invalid("signal length must be positive"));
    }
    for c in &spec.components {
        if !(c.period.is_finite() && c.period > 0.0) {
            return Err(Error::invalid(format!("period must be positive, got {}", c.period)));
        }
    }

    let mut values = vec![0.0; spec.n];
    for c in &spec.components {
        let omega = 2.0 * PI / c.period;
        for (t, v) in values.iter_mut().enumerate() {
            *v += c.amplitude * (omega * t as f64 + c.phase).cos();
        }
    }

    if let Some(trend) = &spec.trend {
        for (t, v) in values.iter_mut().enumerate() {
            let t = t as f64;
            *v += trend.linear * t + trend.quadratic * t * t;
        }
    }

    if let Some(noise) = &spec.noise {
        if !(0.0..1.0).contains(&noise.r) {
            return Err(Error::invalid(format!("AR coefficient must lie in [0, 1), got {}", noise.r)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let z: f64 = StandardNormal.sample(&mut rng);
        // start in the stationary distribution
        let mut e = noise.amplitude * z / (1.0 - noise.r * noise.r).sqrt();
        for (t, v) in values.iter_mut().enumerate() {
            if t > 0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                e = noise.r * e + noise.amplitude * z;
            }
            *v += e;
        }
    }

    TimeSeries::new(values, spec.spacing)
}
