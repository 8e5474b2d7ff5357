//! Time-domain check of a candidate period: take the span between the two
//! strongest fluctuations, raise a threshold until a target number of local
//! maxima remain above it, and look at how regularly those maxima are spaced.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::FluctuationSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityInterval {
    /// First and last sample label, inclusive.
    pub start: i64,
    pub end: i64,
    pub start_index: usize,
    pub end_index: usize,
    /// The two strongest samples are adjacent.
    pub narrow: bool,
}

impl ActivityInterval {
    pub fn indices(&self) -> RangeInclusive<usize> {
        self.start_index..=self.end_index
    }
}

/// Interval between the two largest values (ties go to the earlier sample).
pub fn find_max_activity_interval(fluct: &FluctuationSeries) -> Result<ActivityInterval> {
    let f = fluct.values();
    if f.len() < 3 {
        return Err(Error::invalid(format!("need at least 3 samples, got {}", f.len())));
    }
    if f.iter().all(|&v| v == f[0]) {
        return Err(Error::DegenerateInterval("series is flat; no strongest fluctuations".into()));
    }
    let mut order: Vec<usize> = (0..f.len()).collect();
    // stable sort keeps earlier indices first among equal values
    order.sort_by(|&a, &b| f[b].total_cmp(&f[a]));
    let (i1, i2) = (order[0].min(order[1]), order[0].max(order[1]));
    let narrow = i2 - i1 == 1;
    if narrow {
        log::warn!("strongest fluctuations are adjacent (indices {i1}, {i2})");
    }
    Ok(ActivityInterval {
        start: fluct.label(i1),
        end: fluct.label(i2),
        start_index: i1,
        end_index: i2,
        narrow,
    })
}

/// Local maxima among samples in `range` that exceed `p`.
///
/// Index `i` qualifies when `F_i > p` and `F_i` is above its neighbours in
/// `range`; a neighbour at or below `p`, or outside `range`, never blocks it.
/// A flat top counts once, at its leftmost sample.
pub fn local_maxima_above(values: &[f64], range: RangeInclusive<usize>, p: f64) -> Vec<usize> {
    let (lo, hi) = (*range.start(), (*range.end()).min(values.len().saturating_sub(1)));
    let mut out = Vec::new();
    let mut i = lo;
    while i <= hi {
        if values[i] <= p {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < hi && values[j + 1] == values[i] {
            j += 1;
        }
        let left_ok = i == lo || values[i - 1] < values[i];
        let right_ok = j == hi || values[j + 1] < values[i];
        if left_ok && right_ok {
            out.push(i);
        }
        i = j + 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanStep {
    pub p: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub p: f64,
    /// Labels of the maxima at `p`.
    pub maxima: Vec<i64>,
    /// Every threshold tried, from high to low.
    pub trace: Vec<ScanStep>,
}

/// Largest threshold at which exactly `target_count` maxima remain in `interval`.
///
/// Thresholds are the distinct non-negative values of `F` in the interval,
/// plus zero, tried from the top down.
pub fn threshold_scan(
    fluct: &FluctuationSeries,
    interval: &ActivityInterval,
    target_count: usize,
) -> Result<ThresholdScan> {
    if target_count == 0 {
        return Err(Error::invalid("target count must be at least 1"));
    }
    let f = fluct.values();
    if interval.end_index >= f.len() || interval.start_index > interval.end_index {
        return Err(Error::invalid("interval lies outside the series"));
    }
    let mut levels: Vec<f64> = f[interval.indices()]
        .iter()
        .copied()
        .filter(|&v| v >= 0.0)
        .chain(std::iter::once(0.0))
        .collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();

    let mut trace = Vec::with_capacity(levels.len());
    let mut found: Option<(f64, Vec<usize>)> = None;
    for p in levels {
        let maxima = local_maxima_above(f, interval.indices(), p);
        trace.push(ScanStep {
            p,
            count: maxima.len(),
        });
        if found.is_none() && maxima.len() == target_count {
            found = Some((p, maxima));
        }
    }

    match found {
        Some((p, maxima)) => Ok(ThresholdScan {
            p,
            maxima: maxima.into_iter().map(|i| fluct.label(i)).collect(),
            trace,
        }),
        None => {
            let mut achievable: Vec<usize> = trace.iter().map(|s| s.count).collect();
            achievable.sort_unstable();
            achievable.dedup();
            Err(Error::NotAchievable {
                target: target_count,
                achievable,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximaReport {
    pub interval: Option<[i64; 2]>,
    pub threshold: Option<f64>,
    pub positions: Vec<i64>,
    pub distances: Vec<i64>,
    pub candidate_period: f64,
    /// `max(distances) - min(distances)`.
    pub dispersion: i64,
    /// Distances equal to the candidate period.
    pub exact_matches: usize,
    /// Distances within one sample of the candidate period.
    pub near_matches: usize,
}

/// Successive spacings of `positions` compared with `candidate_period`.
pub fn spacing_report(positions: &[i64], candidate_period: f64) -> Result<MaximaReport> {
    if positions.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 maxima, got {}",
            positions.len()
        )));
    }
    let mut positions = positions.to_vec();
    positions.sort_unstable();
    let distances: Vec<i64> = positions.windows(2).map(|w| w[1] - w[0]).collect();
    let dispersion = distances.iter().max().unwrap() - distances.iter().min().unwrap();
    let exact_matches = distances
        .iter()
        .filter(|&&d| d as f64 == candidate_period)
        .count();
    let near_matches = distances
        .iter()
        .filter(|&&d| (d as f64 - candidate_period).abs() <= 1.0)
        .count();
    Ok(MaximaReport {
        interval: None,
        threshold: None,
        positions,
        distances,
        candidate_period,
        dispersion,
        exact_matches,
        near_matches,
    })
}

/// Interval, threshold scan and spacing report in one go.
pub fn analyze_maxima(
    fluct: &FluctuationSeries,
    target_count: usize,
    candidate_period: f64,
) -> Result<MaximaReport> {
    let interval = find_max_activity_interval(fluct)?;
    let scan = threshold_scan(fluct, &interval, target_count)?;
    let mut report = spacing_report(&scan.maxima, candidate_period)?;
    report.interval = Some([interval.start, interval.end]);
    report.threshold = Some(scan.p);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Spacing;

    fn series(values: Vec<f64>, start: i64) -> FluctuationSeries {
        FluctuationSeries::from_values(values, Spacing::Rotation, start).unwrap()
    }

    #[test]
    fn two_spikes_bound_the_interval() {
        let mut v: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 * 0.1).collect();
        v[10] = 50.0;
        v[90] = 40.0;
        let j = find_max_activity_interval(&series(v, 0)).unwrap();
        assert_eq!((j.start, j.end), (10, 90));
        assert!(!j.narrow);
    }

    #[test]
    fn ramp_gives_narrow_interval_at_the_end() {
        let n = 20;
        let j = find_max_activity_interval(&series((0..n).map(f64::from).collect(), 0)).unwrap();
        assert_eq!((j.start_index, j.end_index), (n as usize - 2, n as usize - 1));
        assert!(j.narrow);
    }

    #[test]
    fn flat_and_short_series_fail() {
        assert!(matches!(
            find_max_activity_interval(&series(vec![2.0; 10], 0)),
            Err(Error::DegenerateInterval(_))
        ));
        assert!(find_max_activity_interval(&series(vec![1.0, 2.0], 0)).is_err());
    }

    #[test]
    fn ties_prefer_earlier_samples() {
        let j = find_max_activity_interval(&series(vec![0.0, 5.0, 1.0, 5.0, 5.0, 0.0], 0)).unwrap();
        assert_eq!((j.start_index, j.end_index), (1, 3));
    }

    #[test]
    fn comb_of_equal_spikes() {
        let mut v = vec![0.0; 70];
        for i in 0..10 {
            v[3 + 7 * i] = 100.0;
        }
        let fl = series(v, 900);
        let j = find_max_activity_interval(&fl).unwrap();
        // first two spikes bound J; widen to the whole comb for the scan
        assert_eq!((j.start, j.end), (903, 910));
        let whole = ActivityInterval {
            start: 903,
            end: 966,
            start_index: 3,
            end_index: 66,
            narrow: false,
        };
        let scan = threshold_scan(&fl, &whole, 10).unwrap();
        assert_eq!(scan.p, 0.0);
        assert_eq!(scan.maxima.len(), 10);
        let report = spacing_report(&scan.maxima, 7.0).unwrap();
        assert_eq!(report.distances, vec![7; 9]);
        assert_eq!(report.dispersion, 0);
    }

    #[test]
    fn negative_series_cannot_reach_target() {
        let fl = series(vec![-5.0, -1.0, -3.0, -0.5, -4.0, -2.0], 0);
        let j = find_max_activity_interval(&fl).unwrap();
        match threshold_scan(&fl, &j, 1) {
            Err(Error::NotAchievable { target: 1, achievable }) => assert_eq!(achievable, vec![0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scan_returns_largest_threshold() {
        // maxima heights 9, 7, 5, 3 between two big spikes
        let v = vec![20.0, 0.0, 9.0, 0.0, 7.0, 0.0, 5.0, 0.0, 3.0, 0.0, 19.0];
        let fl = series(v, 0);
        let j = find_max_activity_interval(&fl).unwrap();
        let scan = threshold_scan(&fl, &j, 4).unwrap();
        assert_eq!(scan.p, 5.0);
        assert_eq!(scan.maxima, vec![0, 2, 4, 10]);
        assert!(scan.trace.windows(2).all(|w| w[0].p > w[1].p));
        assert!(threshold_scan(&fl, &j, 0).is_err());
    }

    #[test]
    fn plateau_counts_once() {
        let v = [0.0, 3.0, 3.0, 3.0, 1.0, 2.0, 0.0];
        assert_eq!(local_maxima_above(&v, 0..=6, 0.5), vec![1, 5]);
        assert_eq!(local_maxima_above(&v, 0..=6, 2.5), vec![1]);
        // a plateau running into a higher value is not a maximum
        let v = [0.0, 3.0, 3.0, 4.0, 0.0];
        assert_eq!(local_maxima_above(&v, 0..=4, 0.0), vec![3]);
    }

    #[test]
    fn spacing_of_irregular_spikes() {
        let r = spacing_report(&[0, 6, 13, 18, 30], 6.0).unwrap();
        assert_eq!(r.distances, vec![6, 7, 5, 12]);
        assert_eq!(r.dispersion, 7);
        assert_eq!(r.exact_matches, 1);
        assert_eq!(r.near_matches, 3);
        assert!(spacing_report(&[4], 6.0).is_err());
    }

    #[test]
    fn combined_analysis() {
        let mut v = vec![0.0; 60];
        v[5] = 300.0;
        v[50] = 280.0;
        for (i, h) in [(12, 200.0), (18, 190.0), (25, 180.0), (31, 170.0), (40, 160.0)] {
            v[i] = h;
        }
        let r = analyze_maxima(&series(v, 950), 7, 6.0).unwrap();
        assert_eq!(r.interval, Some([955, 1000]));
        assert_eq!(r.positions, vec![955, 962, 968, 975, 981, 990, 1000]);
        assert_eq!(r.distances.len(), 6);
        assert_eq!(r.threshold, Some(0.0));
    }
}
