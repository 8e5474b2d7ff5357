//! Build a test signal from JSON and check the AR(1) coefficient.

use alias_scope::{autocorrelation, SignalSpec};

fn main() -> alias_scope::Result<()> {
    let spec: SignalSpec = serde_json::from_str(
        r#"{"n": 5000, "seed": 9, "components": [{"period": 27.0, "amplitude": 0.5}],
            "noise": {"r": 0.9, "amplitude": 1.0}}"#,
    )?;
    let x = alias_scope::synthesize(&spec)?;
    let acf = autocorrelation(x.values(), 5)?;
    println!("first values: {:?}", &x.values()[..4]);
    println!("lag-1 autocorrelation {:.3}", acf.at(1));
    Ok(())
}
