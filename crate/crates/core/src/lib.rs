//! Echo-effect (alias) diagnosis for periodogram peaks.
//!
//! The pipeline runs from a raw series through detrending
//! ([`series::detrend`]), the sample autocorrelation
//! ([`autocorr::autocorrelation`]), Blackman-Tukey and FFT periodograms
//! ([`periodogram`]) and a significance gate ([`significance::assess`]) to the
//! echo diagnosis of a single BT bin ([`de::diagnose_peak`]). A separate
//! threshold scan ([`maxima::analyze_maxima`]) checks how regularly strong
//! maxima are spaced.
//!
//! Runnable examples live in `examples/`:
//! `detrend`, `autocorrelation`, `periodogram`, `significance`,
//! `echo_diagnosis`, `maxima_spacing` and `synthesize`.

pub mod autocorr;
pub mod cli;
pub mod de;
pub mod error;
pub mod io;
pub mod maxima;
pub mod periodogram;
pub mod series;
pub mod significance;
pub mod synth;

pub use autocorr::{autocorrelation, AutocorrFunction, BandPolicy};
pub use de::{diagnose_peak, diagnose_peaks, DeReport, Verdict};
pub use error::{Error, Result};
pub use periodogram::{Method, Periodogram};
pub use series::{detrend, running_mean, EdgePolicy, FluctuationSeries, Spacing, TimeSeries};
pub use significance::{assess, Regime, RegimeChoice};
pub use synth::{synthesize, SignalSpec};
