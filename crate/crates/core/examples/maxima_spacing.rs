//! Raise a threshold until ten maxima remain and compare their spacings with
//! a candidate period.

use alias_scope::maxima::analyze_maxima;
use alias_scope::{FluctuationSeries, SignalSpec, Spacing};

fn main() -> alias_scope::Result<()> {
    let noise = alias_scope::synthesize(&SignalSpec::new(120, 4).white(0.3))?;
    let mut v = noise.values().to_vec();
    // bursts roughly every six rotations, strongest at both ends
    for (i, pos) in [10, 16, 23, 28, 34, 41, 46, 52, 58, 65].into_iter().enumerate() {
        v[pos] += if i == 0 || i == 9 { 5.0 } else { 2.0 + 0.1 * i as f64 };
    }
    let fluct = FluctuationSeries::from_values(v, Spacing::Rotation, 1642)?;
    let report = analyze_maxima(&fluct, 10, 6.0)?;
    println!("interval {:?}, threshold {:?}", report.interval, report.threshold);
    println!("maxima at {:?}", report.positions);
    println!("distances {:?}", report.distances);
    println!(
        "dispersion {}, exact {}, within one {}",
        report.dispersion, report.exact_matches, report.near_matches
    );
    Ok(())
}
