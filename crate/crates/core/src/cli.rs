//! Batch commands behind the `alias-scope` binary.
//!
//! Each command reads one input series, runs part of the pipeline and writes
//! its results into the output directory. Commands are deterministic for a
//! given input and configuration.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::autocorr::{autocorrelation, AutocorrFunction};
use crate::de::{diagnose_with_acf, harmonic_for_period, DeReport};
use crate::error::{Error, Result};
use crate::io::{csv_text, read_series_csv, write_atomic};
use crate::maxima::{analyze_maxima, MaximaReport};
use crate::periodogram::{
    bt_raw_periodogram, bt_smoothed_periodogram, choose_m, fft_periodogram, MSelection, Padding,
    Periodogram, Window, CONFORMITY_THRESHOLD,
};
use crate::series::{detrend, EdgePolicy, FluctuationSeries, Spacing, TimeSeries};
use crate::significance::{
    assess, Regime, RegimeChoice, SignificanceOptions, SignificanceResult, DEFAULT_ALPHA,
    DEFAULT_CONFIDENCE,
};
use crate::synth::{synthesize, SignalSpec};

/// Default number of local maxima the threshold scan aims for.
pub const DEFAULT_TARGET_COUNT: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    /// Samples preceding the series, used by the running mean at the start.
    pub pad_before: Option<PathBuf>,
    pub pad_after: Option<PathBuf>,
    pub spacing: Spacing,
    /// Running-mean window. `None` analyses the input as given.
    pub window: Option<usize>,
    /// Lag cutoffs. More than one triggers conformity selection.
    pub max_lags: Vec<usize>,
    pub harmonics: Vec<usize>,
    pub periods: Vec<f64>,
    pub exclude_c: Vec<usize>,
    pub confidence: f64,
    pub alpha: f64,
    pub regime: RegimeChoice,
    /// Only periods below this enter the conformity score.
    pub period_cap: Option<f64>,
    pub target_count: usize,
    pub out: PathBuf,
}

impl AnalysisConfig {
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            pad_before: None,
            pad_after: None,
            spacing: Spacing::Day,
            window: None,
            max_lags: Vec::new(),
            harmonics: Vec::new(),
            periods: Vec::new(),
            exclude_c: Vec::new(),
            confidence: DEFAULT_CONFIDENCE,
            alpha: DEFAULT_ALPHA,
            regime: RegimeChoice::Auto,
            period_cap: None,
            target_count: DEFAULT_TARGET_COUNT,
            out: out.into(),
        }
    }

    fn significance_options(&self) -> SignificanceOptions {
        SignificanceOptions {
            regime: self.regime,
            alpha: self.alpha,
            confidence: self.confidence,
        }
    }

    fn single_max_lag(&self) -> Result<usize> {
        match self.max_lags.as_slice() {
            [m] => Ok(*m),
            [] => Err(Error::invalid("a lag cutoff M is required")),
            _ => Err(Error::invalid("this command takes a single M")),
        }
    }

    /// Requested harmonics, with periods converted through `round(2M/p)`.
    pub fn resolve_harmonics(&self, max_lag: usize) -> Result<Vec<usize>> {
        let mut ks: BTreeSet<usize> = self.harmonics.iter().copied().collect();
        for &p in &self.periods {
            let k = harmonic_for_period(p, max_lag)?;
            log::info!("period {p} -> k = {k} (bin period {})", 2 * max_lag / k);
            ks.insert(k);
        }
        if ks.is_empty() {
            return Err(Error::invalid("no harmonics requested; pass k values or periods"));
        }
        if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > max_lag) {
            return Err(Error::invalid(format!("harmonic k={k} outside 1..={max_lag}")));
        }
        Ok(ks.into_iter().collect())
    }
}

/// Read the input, attach any padding and detrend when a window is set.
pub fn load_series(config: &AnalysisConfig) -> Result<FluctuationSeries> {
    let csv = read_series_csv(&config.input)?;
    let mut series = TimeSeries::new(csv.values, config.spacing)?;
    if let Some(label) = csv.start_label {
        series = series.with_start_label(label);
    }
    let Some(window) = config.window else {
        return Ok(series.into());
    };
    let pads = match (&config.pad_before, &config.pad_after) {
        (Some(b), Some(a)) => Some((read_series_csv(b)?.values, read_series_csv(a)?.values)),
        (None, None) => None,
        _ => return Err(Error::invalid("pad-before and pad-after must be given together")),
    };
    let policy = match pads {
        Some((before, after)) => {
            series = series.with_padding(before, after)?;
            EdgePolicy::RequirePadding
        }
        None => EdgePolicy::Truncate,
    };
    detrend(&series, window, policy)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_owned(),
        source,
    })
}

/// Writes `acf.csv` with columns `tau,c,two_se`.
pub fn cmd_acf(config: &AnalysisConfig) -> Result<PathBuf> {
    let fluct = load_series(config)?;
    let acf = autocorrelation(fluct.values(), config.single_max_lag()?)?;
    ensure_dir(&config.out)?;
    let path = config.out.join("acf.csv");
    write_atomic(&path, acf_csv(&acf).as_bytes())?;
    Ok(path)
}

fn acf_csv(acf: &AutocorrFunction) -> String {
    let rows = acf.coefficients().iter().enumerate().map(|(tau, c)| {
        let two_se = if tau == 0 { 0.0 } else { 2.0 * acf.se(tau) };
        vec![tau.to_string(), c.to_string(), two_se.to_string()]
    });
    csv_text(&["tau", "c", "two_se"], rows)
}

fn spectrum_csv(spec: &Periodogram, level: Option<&[f64]>) -> String {
    let rows = spec.periods.iter().zip(&spec.power).enumerate().map(|(i, (p, w))| {
        let mut row = vec![p.to_string(), w.to_string()];
        if let Some(level) = level {
            row.push(level[i].to_string());
        }
        row
    });
    match level {
        Some(_) => csv_text(&["period", "power", "level"], rows),
        None => csv_text(&["period", "power"], rows),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub max_lag: usize,
    pub selection: Option<MSelection>,
    pub significance: SignificanceResult,
}

/// Writes `fft.csv`, `bt_raw.csv`, `bt_smoothed.csv`, `significance.csv`
/// and `significance.json`.
pub fn cmd_spectrum(config: &AnalysisConfig) -> Result<SpectrumSummary> {
    let fluct = load_series(config)?;
    let values = fluct.values();
    let (max_lag, selection) = match config.max_lags.len() {
        0 => return Err(Error::invalid("a lag cutoff M is required")),
        1 => (config.max_lags[0], None),
        _ => {
            let cap = config.period_cap.unwrap_or(f64::INFINITY);
            let sel = choose_m(values, &config.max_lags, cap, CONFORMITY_THRESHOLD)?;
            for s in &sel.scores {
                match s.score {
                    Some(r) => println!("M={} conformity={r:.4} bins={}", s.max_lag, s.bins),
                    None => println!("M={} conformity=n/a bins={}", s.max_lag, s.bins),
                }
            }
            log::info!("chosen M = {}", sel.chosen);
            if sel.below_threshold {
                log::warn!("no M reached conformity {CONFORMITY_THRESHOLD}");
            }
            (sel.chosen, Some(sel))
        }
    };

    let acf = autocorrelation(values, max_lag)?;
    let fft = fft_periodogram(values, Window::Hamming, Padding::Auto)?;
    let raw = bt_raw_periodogram(&acf);
    let smoothed = bt_smoothed_periodogram(&acf)?;
    let significance = assess(values, &acf, &smoothed, &config.significance_options())?;

    ensure_dir(&config.out)?;
    write_atomic(&config.out.join("fft.csv"), spectrum_csv(&fft, None).as_bytes())?;
    write_atomic(&config.out.join("bt_raw.csv"), spectrum_csv(&raw, None).as_bytes())?;
    write_atomic(
        &config.out.join("bt_smoothed.csv"),
        spectrum_csv(&smoothed, None).as_bytes(),
    )?;
    let level = significance.red_noise_level.as_deref();
    let sig_csv = match level {
        Some(level) => spectrum_csv(&smoothed, Some(level)),
        None => spectrum_csv(&smoothed, None),
    };
    write_atomic(&config.out.join("significance.csv"), sig_csv.as_bytes())?;

    let summary = SpectrumSummary {
        max_lag,
        selection,
        significance,
    };
    write_json(&config.out.join("significance.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseEntry {
    pub k: usize,
    pub period: usize,
    pub significant: bool,
    pub report: Option<DeReport>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseOutput {
    pub max_lag: usize,
    pub regime: Regime,
    pub exclude_c: Vec<usize>,
    pub entries: Vec<DiagnoseEntry>,
}

fn bin_is_significant(sig: &SignificanceResult, spectrum: &Periodogram, k: usize) -> bool {
    match sig.regime {
        Regime::MarkovRedNoise => sig
            .red_noise_level
            .as_ref()
            .is_some_and(|level| spectrum.power[k - 1] > level[k - 1]),
        Regime::WhiteNoise => sig.fisher.is_some_and(|t| t.reject) || sig.ks.is_some_and(|t| t.reject),
    }
}

/// Significance gate then echo diagnosis per harmonic; writes `diagnose.json`.
pub fn cmd_diagnose(config: &AnalysisConfig) -> Result<DiagnoseOutput> {
    let fluct = load_series(config)?;
    let values = fluct.values();
    let max_lag = config.single_max_lag()?;
    let harmonics = config.resolve_harmonics(max_lag)?;
    let acf = autocorrelation(values, max_lag)?;
    let smoothed = bt_smoothed_periodogram(&acf)?;
    let sig = assess(values, &acf, &smoothed, &config.significance_options())?;

    let mut entries = Vec::with_capacity(harmonics.len());
    for k in harmonics {
        let significant = bin_is_significant(&sig, &smoothed, k);
        let period = 2 * max_lag / k;
        let entry = if significant {
            let report = diagnose_with_acf(&acf, k, &config.exclude_c)?;
            log::info!("{report}");
            DiagnoseEntry {
                k,
                period,
                significant,
                report: Some(report),
                note: None,
            }
        } else {
            DiagnoseEntry {
                k,
                period,
                significant,
                report: None,
                note: Some("not significant; echo diagnosis skipped".into()),
            }
        };
        entries.push(entry);
    }

    let output = DiagnoseOutput {
        max_lag,
        regime: sig.regime,
        exclude_c: config.exclude_c.clone(),
        entries,
    };
    ensure_dir(&config.out)?;
    write_json(&config.out.join("diagnose.json"), &output)?;
    Ok(output)
}

/// Threshold scan and spacing report; writes `maxima.json` and
/// `distances.csv`.
pub fn cmd_maxima(config: &AnalysisConfig) -> Result<MaximaReport> {
    let candidate = match config.periods.as_slice() {
        [p] => *p,
        _ => return Err(Error::invalid("maxima needs exactly one candidate period")),
    };
    let fluct = load_series(config)?;
    let report = analyze_maxima(&fluct, config.target_count, candidate)?;

    ensure_dir(&config.out)?;
    write_json(&config.out.join("maxima.json"), &report)?;
    let rows = report
        .distances
        .iter()
        .enumerate()
        .map(|(i, d)| vec![(i + 1).to_string(), d.to_string()]);
    write_atomic(
        &config.out.join("distances.csv"),
        csv_text(&["index", "distance"], rows).as_bytes(),
    )?;
    Ok(report)
}

/// Parse a JSON signal description. `seed` overrides the file's seed.
pub fn read_signal_spec(path: &Path, seed: Option<u64>) -> Result<SignalSpec> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut spec: SignalSpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    Ok(spec)
}

/// Synthesize a series from a JSON spec and write it as one-column CSV.
pub fn cmd_synth(spec_file: &Path, seed: Option<u64>, out: &Path) -> Result<PathBuf> {
    let spec = read_signal_spec(spec_file, seed)?;
    let series = synthesize(&spec)?;
    let mut text = String::from("value\n");
    for v in series.values() {
        writeln!(text, "{v}").expect("writing to a String");
    }
    let path = if out.extension().is_some() {
        if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
            ensure_dir(dir)?;
        }
        out.to_owned()
    } else {
        ensure_dir(out)?;
        out.join("synth.csv")
    };
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}
