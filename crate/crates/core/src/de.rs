//! Diagnosis of echo-effect aliases in a Blackman–Tukey raw estimate.
//!
//! For harmonic `k` of lag cutoff `M`, the lag range `1..M` is cut into
//! `k + 1` open intervals on which the probing cosine `cos(πkτ/M)` keeps its
//! sign:
//!
//! ```text
//! interval 0:      0            < τ < M/2k
//! interval l:      (2l-1)M/2k   < τ < (2l+1)M/2k      (l = 1..k-1)
//! interval k:      (2k-1)M/2k   < τ < M
//! ```
//!
//! Within interval `l` each lag whose product `c_τ cos(πkτ/M)` is nonzero
//! goes to exactly one of
//!
//! * `A_l`: the product is negative,
//! * `B_l`: both factors are negative,
//! * `C_l`: both factors are positive.
//!
//! The positive mass `ws = Σ_B + Σ_C` is split into percentages `ds⁺(l)` (from
//! `C_l`) and `ds⁻(j)` (from `B_j`). A peak is supported when positive
//! autocorrelation dominates (`2 ds⁺ - 100 > 0`) *and* the largest `C_l`
//! contribution comes from the interval containing the peak's own period
//! `floor(2M/k)`. Otherwise the peak is most likely an echo of structure at
//! other lags.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autocorr::{autocorrelation, AutocorrFunction};
use crate::error::{Error, Result};
use crate::periodogram::bt_period;

/// Interval index of lag `tau`, or `None` when `tau` sits exactly on an
/// interval boundary (where `cos(πkτ/M) = 0`) or outside `1..M`.
pub fn interval_index(tau: usize, k: usize, max_lag: usize) -> Option<usize> {
    if tau == 0 || tau >= max_lag {
        return None;
    }
    let scaled = 2 * k as u128 * tau as u128;
    let m = max_lag as u128;
    if scaled.is_multiple_of(m) && (scaled / m) % 2 == 1 {
        return None;
    }
    Some(((scaled + m) / (2 * m)) as usize)
}

/// Open bounds of interval `l`.
pub fn interval_bounds(l: usize, k: usize, max_lag: usize) -> (f64, f64) {
    let half = max_lag as f64 / (2 * k) as f64;
    let lo = if l == 0 { 0.0 } else { (2 * l - 1) as f64 * half };
    let hi = if l == k {
        max_lag as f64
    } else {
        (2 * l + 1) as f64 * half
    };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagPartition {
    pub k: usize,
    pub max_lag: usize,
    /// `a[i]`: lags with a negative product in interval `i`.
    pub a: Vec<Vec<usize>>,
    /// `b[j]`: lags where both factors are negative in interval `j`.
    pub b: Vec<Vec<usize>>,
    /// `c[l]`: lags where both factors are positive in interval `l`.
    pub c: Vec<Vec<usize>>,
}

fn nonempty(sets: &[Vec<usize>]) -> Vec<usize> {
    sets.iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(i, _)| i)
        .collect()
}

impl LagPartition {
    pub fn index_a(&self) -> Vec<usize> {
        nonempty(&self.a)
    }

    pub fn index_b(&self) -> Vec<usize> {
        nonempty(&self.b)
    }

    /// Indices `l` (including 0) whose `C_l` is nonempty.
    pub fn index_c(&self) -> Vec<usize> {
        nonempty(&self.c)
    }

    pub fn bounds(&self, l: usize) -> (f64, f64) {
        interval_bounds(l, self.k, self.max_lag)
    }

    /// Smallest and largest lag in `C_l`.
    pub fn c_span(&self, l: usize) -> Option<[usize; 2]> {
        let set = self.c.get(l)?;
        Some([*set.first()?, *set.last()?])
    }
}

fn check_harmonic(k: usize, max_lag: usize) -> Result<()> {
    if k == 0 || k > max_lag {
        return Err(Error::invalid(format!("harmonic k={k} outside 1..={max_lag}")));
    }
    Ok(())
}

/// Split lags `1..M` into the `A`, `B` and `C` families for harmonic `k`.
pub fn partition_lags(acf: &AutocorrFunction, k: usize) -> Result<LagPartition> {
    let max_lag = acf.max_lag();
    check_harmonic(k, max_lag)?;
    let mut part = LagPartition {
        k,
        max_lag,
        a: vec![Vec::new(); k + 1],
        b: vec![Vec::new(); k + 1],
        c: vec![Vec::new(); k + 1],
    };
    let step = std::f64::consts::PI * k as f64 / max_lag as f64;
    for tau in 1..max_lag {
        let Some(l) = interval_index(tau, k, max_lag) else {
            continue;
        };
        let ct = acf.at(tau);
        let cs = (step * tau as f64).cos();
        if ct * cs < 0.0 {
            part.a[l].push(tau);
        } else if ct < 0.0 && cs < 0.0 {
            part.b[l].push(tau);
        } else if ct > 0.0 && cs > 0.0 {
            part.c[l].push(tau);
        }
    }
    Ok(part)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsIndices {
    pub k: usize,
    pub max_lag: usize,
    /// `ws⁺(l) = Σ_{τ∈C_l} c_τ cos(πkτ/M)`, indexed `0..=k`.
    pub ws_plus: Vec<f64>,
    /// `ws⁻(j) = Σ_{τ∈B_j} c_τ cos(πkτ/M)`, indexed `0..=k` (non-negative).
    pub ws_minus: Vec<f64>,
    pub ws: f64,
    /// Percentages of `ws`; zero for empty sets.
    pub ds_plus: Vec<f64>,
    pub ds_minus: Vec<f64>,
    pub ds_plus_total: f64,
    pub ds_minus_total: f64,
}

fn weighted_sums(sets: &[Vec<usize>], acf: &AutocorrFunction, step: f64) -> Vec<f64> {
    sets.iter()
        .map(|s| s.iter().map(|&t| acf.at(t) * (step * t as f64).cos()).sum())
        .collect()
}

/// Percentage contributions of each `C_l` and `B_j` to the positive mass.
pub fn ds_indices(partition: &LagPartition, acf: &AutocorrFunction) -> Result<DsIndices> {
    if acf.max_lag() != partition.max_lag {
        return Err(Error::invalid(format!(
            "partition built for M={} but autocorrelation has M={}",
            partition.max_lag,
            acf.max_lag()
        )));
    }
    let step = std::f64::consts::PI * partition.k as f64 / partition.max_lag as f64;
    let ws_plus = weighted_sums(&partition.c, acf, step);
    let ws_minus = weighted_sums(&partition.b, acf, step);
    let ws = ws_plus.iter().sum::<f64>() + ws_minus.iter().sum::<f64>();
    if !(ws > 0.0) {
        return Err(Error::DegenerateSpectrum {
            k: partition.k,
            max_lag: partition.max_lag,
        });
    }
    let pct = |v: &Vec<f64>| v.iter().map(|w| 100.0 * w / ws).collect::<Vec<_>>();
    let ds_plus = pct(&ws_plus);
    let ds_minus = pct(&ws_minus);
    Ok(DsIndices {
        k: partition.k,
        max_lag: partition.max_lag,
        ds_plus_total: ds_plus.iter().sum(),
        ds_minus_total: ds_minus.iter().sum(),
        ws_plus,
        ws_minus,
        ws,
        ds_plus,
        ds_minus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PeakSupported,
    PeakNotTreatableAsTrue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition7 {
    pub ds_plus_total: f64,
    /// `2 ds⁺ - 100`.
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition8 {
    /// Index of the `C` set with the largest `ds⁺` among the candidates.
    pub m: usize,
    pub ds_plus_at_m: f64,
    /// Open interval searched for `C_m`.
    pub interval: (f64, f64),
    /// Smallest and largest lag actually in `C_m`.
    pub span: [usize; 2],
    pub contains_period: bool,
    /// Another candidate had exactly the same `ds⁺`; the smallest index won.
    pub tie: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeReport {
    pub k: usize,
    pub max_lag: usize,
    /// `floor(2M/k)` in samples.
    pub period: usize,
    pub condition7: Condition7,
    pub condition8: Condition8,
    /// `C` indices left out of the argmax.
    pub excluded_sets: Vec<usize>,
    pub verdict: Verdict,
    /// Centre lag `mM/k` of the winning interval. When the verdict is
    /// negative the peak is mostly built from lags around here.
    pub dominant_lag: f64,
    pub ds: DsIndices,
    /// `[first, last]` lag of each nonempty `C_l`, indexed `0..=k`.
    pub c_spans: Vec<Option<[usize; 2]>>,
}

impl fmt::Display for DeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c8 = &self.condition8;
        writeln!(
            f,
            "k={} M={} period={} : {:?}",
            self.k, self.max_lag, self.period, self.verdict
        )?;
        writeln!(
            f,
            "  2ds+ - 100 = {:.1}% ({})",
            self.condition7.margin,
            if self.condition7.passed { "pass" } else { "fail" }
        )?;
        write!(
            f,
            "  argmax ds+({}) = {:.1}% over C_{} = [{}, {}]; period {} {} ({})",
            c8.m,
            c8.ds_plus_at_m,
            c8.m,
            c8.span[0],
            c8.span[1],
            self.period,
            if c8.contains_period { "inside" } else { "outside" },
            if c8.passed { "pass" } else { "fail" }
        )
    }
}

/// Check positive dominance and that the strongest positive interval holds
/// the peak's own period.
pub fn evaluate_conditions(
    ds: &DsIndices,
    partition: &LagPartition,
    exclude: &[usize],
) -> Result<DeReport> {
    let k = partition.k;
    if ds.k != k || ds.max_lag != partition.max_lag {
        return Err(Error::invalid("ds indices and partition disagree on (k, M)"));
    }
    if let Some(&bad) = exclude.iter().find(|&&l| l > k) {
        return Err(Error::invalid(format!("excluded set C_{bad} does not exist for k={k}")));
    }
    let exclude: BTreeSet<usize> = exclude.iter().copied().collect();
    let index_c = partition.index_c();
    let excluded_sets: Vec<usize> = index_c.iter().copied().filter(|l| exclude.contains(l)).collect();

    let mut best: Option<(usize, f64)> = None;
    let mut tie = false;
    for &l in index_c.iter().filter(|l| !exclude.contains(l)) {
        let v = ds.ds_plus[l];
        match best {
            None => best = Some((l, v)),
            Some((_, b)) if v > b => {
                best = Some((l, v));
                tie = false;
            }
            Some((_, b)) if v == b => tie = true,
            _ => {}
        }
    }
    let (m, ds_plus_at_m) = best.ok_or(Error::NoCandidateSets { k })?;

    let margin = 2.0 * ds.ds_plus_total - 100.0;
    let condition7 = Condition7 {
        ds_plus_total: ds.ds_plus_total,
        margin,
        passed: margin > 0.0,
    };

    let period = bt_period(partition.max_lag, k);
    let contains_period = partition.c[m].binary_search(&period).is_ok();
    let condition8 = Condition8 {
        m,
        ds_plus_at_m,
        interval: partition.bounds(m),
        span: partition.c_span(m).expect("argmax set is nonempty"),
        contains_period,
        tie,
        passed: contains_period,
    };

    let verdict = if condition7.passed && condition8.passed {
        Verdict::PeakSupported
    } else {
        Verdict::PeakNotTreatableAsTrue
    };

    Ok(DeReport {
        k,
        max_lag: partition.max_lag,
        period,
        condition7,
        condition8,
        excluded_sets,
        verdict,
        dominant_lag: (m * partition.max_lag) as f64 / k as f64,
        ds: ds.clone(),
        c_spans: (0..=k).map(|l| partition.c_span(l)).collect(),
    })
}

/// Run the full diagnosis for one harmonic from a prepared autocorrelation.
pub fn diagnose_with_acf(acf: &AutocorrFunction, k: usize, exclude: &[usize]) -> Result<DeReport> {
    let partition = partition_lags(acf, k)?;
    let ds = ds_indices(&partition, acf)?;
    evaluate_conditions(&ds, &partition, exclude)
}

/// Autocorrelation, partition, ds indices and conditions for harmonic `k`.
pub fn diagnose_peak(values: &[f64], max_lag: usize, k: usize, exclude: &[usize]) -> Result<DeReport> {
    let acf = autocorrelation(values, max_lag)?;
    diagnose_with_acf(&acf, k, exclude)
}

/// Diagnose several harmonics of the same autocorrelation.
pub fn diagnose_peaks(
    acf: &AutocorrFunction,
    harmonics: &[usize],
    exclude: &[usize],
) -> Vec<Result<DeReport>> {
    harmonics
        .par_iter()
        .map(|&k| diagnose_with_acf(acf, k, exclude))
        .collect()
}

/// Harmonic index nearest to a period: `round(2M/period)`, at least 1.
pub fn harmonic_for_period(period: f64, max_lag: usize) -> Result<usize> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::invalid(format!("period must be positive, got {period}")));
    }
    let k = (2.0 * max_lag as f64 / period).round().max(1.0) as usize;
    check_harmonic(k, max_lag)?;
    Ok(k)
}
