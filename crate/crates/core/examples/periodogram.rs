//! FFT and Blackman-Tukey periodograms, and choosing M by their agreement.

use alias_scope::periodogram::{
    bt_smoothed_periodogram, choose_m, fft_periodogram, Padding, Window, CONFORMITY_THRESHOLD,
};
use alias_scope::{autocorrelation, SignalSpec};

fn main() -> alias_scope::Result<()> {
    let x = alias_scope::synthesize(&SignalSpec::new(3653, 11).cosine(154.0, 1.0).ar1(0.5, 0.5))?;
    let v = x.values();

    let fft = fft_periodogram(v, Window::Hamming, Padding::Auto)?;
    let j = fft.peak_bin().unwrap();
    println!("FFT peak: period {:.1} (L = {})", fft.periods[j], fft.transform_len.unwrap());

    let bt = bt_smoothed_periodogram(&autocorrelation(v, 1000)?)?;
    let k = bt.peak_bin().unwrap();
    println!("BT peak: k = {}, period {}", k + 1, bt.periods[k]);

    let sel = choose_m(v, &[250, 500, 1000], 400.0, CONFORMITY_THRESHOLD)?;
    for s in &sel.scores {
        println!("M = {:>4}: {:?} over {} bins", s.max_lag, s.score, s.bins);
    }
    println!("chosen M = {}", sel.chosen);
    Ok(())
}
