//! Magnitude spectrum of one frame and the feature vector kept below a cutoff.

use std::f64::consts::TAU;

use airsense::dsp::{extract_features, feature_len, fft_magnitudes, Spectrum};

fn main() -> airsense::Result<()> {
    let frame: Vec<f64> = (0..256)
        .map(|i| {
            let t = i as f64 / 16_000.0;
            800.0 * (TAU * 125.0 * t).cos() + 300.0 * (TAU * 250.0 * t).sin() + 50.0
        })
        .collect();
    let spectrum = fft_magnitudes(&frame)?;
    for (k, m) in spectrum.magnitudes.iter().enumerate().take(8) {
        println!("bin {k} ({:>5.1} Hz): {m:.3}", Spectrum::bin_frequency(k));
    }
    for cutoff in [62.5, 250.0, 375.0, 500.0] {
        let f = extract_features(&frame, 0.0, cutoff)?;
        println!("cutoff {cutoff}: {} features (expected {})", f.values.len(), feature_len(cutoff)?);
    }
    Ok(())
}
