//! Remove a slow trend with a running mean, then aggregate to rotations.

use alias_scope::series::{aggregate_to_rotation, CARRINGTON_ROTATION_DAYS};
use alias_scope::synth::Trend;
use alias_scope::{detrend, EdgePolicy, SignalSpec, Spacing, TimeSeries};

fn main() -> alias_scope::Result<()> {
    let mut spec = SignalSpec::new(3653 + 364, 7).cosine(154.0, 1.0).white(0.3);
    spec.trend = Some(Trend {
        linear: 1e-3,
        quadratic: 0.0,
    });
    let all = alias_scope::synthesize(&spec)?.values().to_vec();

    // 182 samples either side let the 365-day mean cover the whole series
    let (before, rest) = all.split_at(182);
    let (body, after) = rest.split_at(3653);
    let daily = TimeSeries::new(body.to_vec(), Spacing::Day)?
        .with_padding(before.to_vec(), after.to_vec())?;
    let fluct = detrend(&daily, Spacing::Day.default_window(), EdgePolicy::RequirePadding)?;
    println!("daily fluctuations: {} samples, mean {:+.4}", fluct.len(), mean(fluct.values()));

    let rot = aggregate_to_rotation(&TimeSeries::new(body.to_vec(), Spacing::Day)?, CARRINGTON_ROTATION_DAYS)?;
    println!("rotation means: {} values", rot.len());

    // without padding the edges are dropped
    let bare = TimeSeries::new(body.to_vec(), Spacing::Day)?;
    let short = detrend(&bare, 365, EdgePolicy::Truncate)?;
    println!("truncated: {} samples, first label {}", short.len(), short.label(0));
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
