//! Uniformly sampled series, centred running means and rotation aggregation.
//!
//! A running mean of odd width `w` needs `(w - 1) / 2` samples beyond each
//! end of the series. Those come from explicit pad sequences (for instance
//! the tail of the previous solar cycle and the head of the next one). A
//! caller without such data must opt into [`EdgePolicy::Truncate`], which
//! drops the edge samples instead of inventing values for them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Synodic Carrington rotation period in days.
pub const CARRINGTON_ROTATION_DAYS: f64 = 27.2753;

/// Running-mean window for rotation and monthly series.
pub const SHORT_WINDOW: usize = 13;

/// Running-mean window for daily series.
pub const DAILY_WINDOW: usize = 365;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Day,
    Rotation,
    Month,
}

impl Spacing {
    /// Default detrending window for this sampling interval.
    pub fn default_window(self) -> usize {
        match self {
            Spacing::Day => DAILY_WINDOW,
            Spacing::Rotation | Spacing::Month => SHORT_WINDOW,
        }
    }
}

impl std::str::FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "day" => Ok(Spacing::Day),
            "rotation" => Ok(Spacing::Rotation),
            "month" => Ok(Spacing::Month),
            other => Err(Error::invalid(format!("unknown spacing '{other}'"))),
        }
    }
}

/// What to do when a running mean reaches past the available data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    /// Fail with [`Error::InsufficientPadding`] unless pads cover the window.
    #[default]
    RequirePadding,
    /// Use pads where present; otherwise shorten the output by `window - 1`.
    Truncate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    spacing: Spacing,
    start_label: i64,
    pad_before: Option<Vec<f64>>,
    pad_after: Option<Vec<f64>>,
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{what} value at index {i} is not finite")));
    }
    Ok(())
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("time series must not be empty"));
        }
        check_finite(&values, "series")?;
        Ok(Self {
            values,
            spacing,
            start_label: 0,
            pad_before: None,
            pad_after: None,
        })
    }

    pub fn with_start_label(mut self, label: i64) -> Self {
        self.start_label = label;
        self
    }

    /// Attach edge data used only by running means.
    pub fn with_padding(mut self, before: Vec<f64>, after: Vec<f64>) -> Result<Self> {
        check_finite(&before, "pad_before")?;
        check_finite(&after, "pad_after")?;
        self.pad_before = Some(before);
        self.pad_after = Some(after);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn start_label(&self) -> i64 {
        self.start_label
    }

    pub fn pad_before(&self) -> Option<&[f64]> {
        self.pad_before.as_deref()
    }

    pub fn pad_after(&self) -> Option<&[f64]> {
        self.pad_after.as_deref()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// A series minus its centred running mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationSeries {
    pub values: Vec<f64>,
    pub spacing: Spacing,
    pub start_label: i64,
    /// Width of the running mean that was removed, in samples.
    pub source_window: usize,
}

impl FluctuationSeries {
    /// Wrap values that are already fluctuations (e.g. read from a file).
    pub fn from_values(values: Vec<f64>, spacing: Spacing, start_label: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("fluctuation series must not be empty"));
        }
        check_finite(&values, "series")?;
        Ok(Self {
            values,
            spacing,
            start_label,
            source_window: 0,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sample label of index `i`.
    pub fn label(&self, i: usize) -> i64 {
        self.start_label + i as i64
    }
}

impl From<TimeSeries> for FluctuationSeries {
    fn from(series: TimeSeries) -> Self {
        Self {
            values: series.values,
            spacing: series.spacing,
            start_label: series.start_label,
            source_window: 0,
        }
    }
}

fn check_window(window: usize) -> Result<usize> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "running-mean window must be odd and positive, got {window}"
        )));
    }
    Ok((window - 1) / 2)
}

/// Centred running mean of odd width `window`.
///
/// With sufficient padding the output has the input's length and label.
/// Under [`EdgePolicy::Truncate`] without padding the output covers indices
/// `half..N-half` and its start label moves forward by `half`.
pub fn running_mean(series: &TimeSeries, window: usize, policy: EdgePolicy) -> Result<TimeSeries> {
    let half = check_window(window)?;
    let before = series.pad_before().unwrap_or(&[]);
    let after = series.pad_after().unwrap_or(&[]);
    let padded = before.len() >= half && after.len() >= half;

    let (ext, offset): (Vec<f64>, i64) = if padded {
        let mut ext = Vec::with_capacity(series.len() + 2 * half);
        ext.extend_from_slice(&before[before.len() - half..]);
        ext.extend_from_slice(series.values());
        ext.extend_from_slice(&after[..half]);
        (ext, 0)
    } else {
        match policy {
            EdgePolicy::RequirePadding => {
                return Err(Error::InsufficientPadding {
                    window,
                    needed: half,
                    before: before.len(),
                    after: after.len(),
                })
            }
            EdgePolicy::Truncate => {
                if series.len() < window {
                    return Err(Error::invalid(format!(
                        "series of length {} is shorter than window {window}",
                        series.len()
                    )));
                }
                log::warn!(
                    "running mean of width {window} without padding: output truncated by {} samples",
                    window - 1
                );
                (series.values().to_vec(), half as i64)
            }
        }
    };

    let scale = 1.0 / window as f64;
    let values: Vec<f64> = ext
        .windows(window)
        .map(|w| w.iter().sum::<f64>() * scale)
        .collect();

    Ok(TimeSeries {
        values,
        spacing: series.spacing,
        start_label: series.start_label + offset,
        pad_before: None,
        pad_after: None,
    })
}

/// Subtract the centred running mean from the series.
pub fn detrend(series: &TimeSeries, window: usize, policy: EdgePolicy) -> Result<FluctuationSeries> {
    let smooth = running_mean(series, window, policy)?;
    let skip = (smooth.start_label - series.start_label) as usize;
    let values = series.values()[skip..skip + smooth.len()]
        .iter()
        .zip(smooth.values())
        .map(|(x, m)| x - m)
        .collect();
    Ok(FluctuationSeries {
        values,
        spacing: series.spacing,
        start_label: smooth.start_label,
        source_window: window,
    })
}

/// Average a daily series into fixed-length rotation blocks.
///
/// Day `i` (counted from the start of the series) belongs to block
/// `floor(i / rotation_length_days)`. Only complete blocks are emitted.
pub fn aggregate_to_rotation(daily: &TimeSeries, rotation_length_days: f64) -> Result<TimeSeries> {
    if daily.spacing != Spacing::Day {
        return Err(Error::invalid("rotation aggregation needs a daily series"));
    }
    if !(rotation_length_days.is_finite() && rotation_length_days > 0.0) {
        return Err(Error::invalid(format!(
            "rotation length must be positive, got {rotation_length_days}"
        )));
    }
    let n_blocks = (daily.len() as f64 / rotation_length_days).floor() as usize;
    if n_blocks == 0 {
        return Err(Error::invalid("series shorter than one rotation"));
    }

    let mut sums = vec![0.0; n_blocks];
    let mut counts = vec![0usize; n_blocks];
    for (i, v) in daily.values().iter().enumerate() {
        let block = (i as f64 / rotation_length_days).floor() as usize;
        if block < n_blocks {
            sums[block] += v;
            counts[block] += 1;
        }
    }
    let values = sums
        .into_iter()
        .zip(counts)
        .enumerate()
        .map(|(b, (s, c))| {
            if c == 0 {
                Err(Error::DegenerateSeries(format!("rotation block {b} is empty")))
            } else {
                Ok(s / c as f64)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    TimeSeries::new(values, Spacing::Rotation)
}
