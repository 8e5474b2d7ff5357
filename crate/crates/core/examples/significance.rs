//! Regime choice, red-noise level and the white-noise tests.

use alias_scope::periodogram::bt_smoothed_periodogram;
use alias_scope::significance::SignificanceOptions;
use alias_scope::{assess, autocorrelation, SignalSpec};

fn main() -> alias_scope::Result<()> {
    for (name, spec) in [
        ("red", SignalSpec::new(2048, 1).ar1(0.7, 1.0).cosine(40.0, 0.6)),
        ("white", SignalSpec::new(2048, 2).white(1.0).cosine(40.0, 0.3)),
    ] {
        let x = alias_scope::synthesize(&spec)?;
        let acf = autocorrelation(x.values(), 200)?;
        let bt = bt_smoothed_periodogram(&acf)?;
        let sig = assess(x.values(), &acf, &bt, &SignificanceOptions::default())?;
        println!("{name}: regime {:?}", sig.regime);
        if let Some(level) = &sig.red_noise_level {
            let above: Vec<usize> = (0..bt.len()).filter(|&i| bt.power[i] > level[i]).collect();
            println!("  bins above 95% level: {:?}", above.iter().map(|i| bt.periods[*i]).collect::<Vec<_>>());
        }
        if let (Some(f), Some(ks)) = (sig.fisher, sig.ks) {
            println!("  Fisher g = {:.4}, p = {:.3e}", f.statistic, f.p_value);
            println!("  KS D = {:.4}, p = {:.3e}", ks.statistic, ks.p_value);
        }
    }
    Ok(())
}
