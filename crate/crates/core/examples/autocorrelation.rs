//! Sample autocorrelation of an AR(1) series with its two-standard-error band.

use alias_scope::autocorr::is_significantly_positive;
use alias_scope::{autocorrelation, BandPolicy, SignalSpec};

fn main() -> alias_scope::Result<()> {
    let x = alias_scope::synthesize(&SignalSpec::new(2000, 3).ar1(0.7, 1.0))?;
    let acf = autocorrelation(x.values(), 20)?;
    println!("tau      c     2se");
    for tau in 1..=10 {
        println!("{tau:>3} {:>7.3} {:>7.3}", acf.at(tau), 2.0 * acf.se(tau));
    }
    println!("c_1 significant: {}", is_significantly_positive(&acf, 1)?);

    let flat = acf.with_band(BandPolicy::Constant);
    println!("constant band at lag 10: {:.4}", 2.0 * flat.se(10));
    Ok(())
}
