//! A 450-day signal leaves echoes near 150 days. The diagnosis rejects the
//! echo bin and keeps the bin that holds the signal itself.

use alias_scope::{autocorrelation, de::diagnose_peaks, SignalSpec};

fn main() -> alias_scope::Result<()> {
    let x = alias_scope::synthesize(&SignalSpec::new(3653, 17).cosine(450.0, 1.0).ar1(0.5, 0.3))?;
    let acf = autocorrelation(x.values(), 1000)?;
    for report in diagnose_peaks(&acf, &[4, 13], &[]) {
        let r = report?;
        println!("{r}");
        println!("  strongest positive set C_{} at lag {:.1}", r.condition8.m, r.dominant_lag);
    }
    Ok(())
}
