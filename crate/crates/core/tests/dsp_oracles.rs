use std::f64::consts::PI;

use airsense::dsp::{
    apply_filter, band_energy, design_lowpass, extract_features, fft_magnitudes, FilterSpec, Radix2Fft,
};
use airsense::rng::SplitMix64;
use proptest::prelude::*;

/// O(N^2) DFT, angle index reduced mod N so the twiddles are exact table
/// lookups of `k * n mod N`.
fn dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &v) in x.iter().enumerate() {
                let angle = -2.0 * PI * ((k * j) % n) as f64 / n as f64;
                re += v * angle.cos();
                im += v * angle.sin();
            }
            let scale = if k == 0 || k == n / 2 { 1.0 } else { 2.0 };
            scale * (re * re + im * im).sqrt() / n as f64
        })
        .collect()
}

fn random_frame(rng: &mut SplitMix64) -> Vec<i16> {
    (0..256).map(|_| rng.uniform(-32768.0, 32767.0) as i16).collect()
}

#[test]
fn fft_matches_dft_on_random_frames() {
    let mut rng = SplitMix64::new(0xF0F0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let frame = random_frame(&mut rng);
        let x: Vec<f64> = frame.iter().map(|&s| f64::from(s)).collect();
        let fast = fft_magnitudes(&frame).unwrap().magnitudes;
        for (a, b) in fast.iter().zip(dft_magnitudes(&x)) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst < 1e-9, "max deviation {worst}");
}

#[test]
fn fft_matches_dft_at_other_sizes() {
    let mut rng = SplitMix64::new(3);
    for len in [1usize, 2, 4, 8, 64, 1024] {
        let x: Vec<f64> = (0..len).map(|_| rng.gaussian()).collect();
        let out = Radix2Fft::new(len).process_real(&x);
        for (k, o) in out.iter().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &v) in x.iter().enumerate() {
                let angle = -2.0 * PI * ((k * j) % len) as f64 / len as f64;
                re += v * angle.cos();
                im += v * angle.sin();
            }
            assert!((o.re - re).abs() < 1e-9 && (o.im - im).abs() < 1e-9, "len {len} bin {k}");
        }
    }
}

#[test]
fn exact_bin_cosine() {
    let frame: Vec<f64> = (0..256).map(|i| 1000.0 * (2.0 * PI * 125.0 * i as f64 / 16_000.0).cos()).collect();
    let mags = fft_magnitudes(&frame).unwrap().magnitudes;
    for (k, m) in mags.iter().enumerate() {
        let expected = if k == 2 { 1000.0 } else { 0.0 };
        assert!((m - expected).abs() < 1e-6, "bin {k}: {m}");
    }
}

/// Direct evaluation of `y[i] = sum_j h[j] x[i + delay - j]` with explicit
/// bounds checks.
fn convolve_oracle(h: &[f64], x: &[f64]) -> Vec<f64> {
    let delay = (h.len() - 1) as isize / 2;
    (0..x.len() as isize)
        .map(|i| {
            let mut acc = 0.0;
            for (j, &hj) in h.iter().enumerate() {
                let idx = i + delay - j as isize;
                if idx >= 0 && (idx as usize) < x.len() {
                    acc += hj * x[idx as usize];
                }
            }
            acc
        })
        .collect()
}

#[test]
fn filter_matches_direct_convolution() {
    let mut rng = SplitMix64::new(17);
    for cutoff in [62.5, 375.0, 500.0, 2000.0] {
        let kernel = design_lowpass(FilterSpec::lowpass(cutoff)).unwrap();
        let x: Vec<f64> = (0..1500).map(|_| rng.uniform(-1000.0, 1000.0)).collect();
        let fast = apply_filter(&kernel, &x).unwrap();
        for (a, b) in fast.iter().zip(convolve_oracle(&kernel.taps, &x)) {
            assert!((a - b).abs() < 1e-9, "cutoff {cutoff}: {a} vs {b}");
        }
    }
}

/// Sampled every 62.5 Hz over `[cutoff, 4 cutoff]`, the response falls
/// monotonically (1 dB slack) through the transition band. Past the first
/// null it rides on window sidelobes, which never climb back above -50 dB.
#[test]
fn filter_attenuation_is_monotone_until_stopband() {
    const FLOOR_DB: f64 = -50.0;
    for cutoff in [125.0, 250.0, 375.0, 500.0] {
        let kernel = design_lowpass(FilterSpec::lowpass(cutoff)).unwrap();
        let grid: Vec<f64> = (0..).map(|k| cutoff + 62.5 * k as f64).take_while(|&f| f <= 4.0 * cutoff).collect();
        let db: Vec<f64> = grid.iter().map(|&f| kernel.response_db(f)).collect();
        let mut reached_floor = false;
        for i in 1..db.len() {
            if reached_floor {
                assert!(db[i] < FLOOR_DB, "cutoff {cutoff}: {} dB at {} Hz", db[i], grid[i]);
            } else {
                assert!(db[i] <= db[i - 1] + 1.0, "cutoff {cutoff}: rise at {} Hz", grid[i]);
            }
            reached_floor |= db[i] < FLOOR_DB;
        }
        assert!(reached_floor, "cutoff {cutoff} never reaches the stopband");
    }
}

#[test]
fn kernel_shape() {
    let k = design_lowpass(FilterSpec::default()).unwrap();
    assert_eq!(k.taps.len(), 255);
    assert!((k.taps.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((0..255).all(|i| k.taps[i] == k.taps[254 - i]));
    assert!((k.response(0.0) - 1.0).abs() < 1e-12);
}

#[test]
fn band_energy_parseval() {
    let mut rng = SplitMix64::new(99);
    for len in [256usize, 1000, 4096, 16_000] {
        let x: Vec<f64> = (0..len).map(|_| rng.gaussian() * 300.0).collect();
        let time: f64 = x.iter().map(|v| v * v).sum();
        let freq = band_energy(&x, 16_000, 0.0, 8000.0).unwrap();
        assert!((freq / time - 1.0).abs() < 1e-3, "len {len}: {freq} vs {time}");
    }
}

#[test]
fn band_energy_splits_add_up() {
    let mut rng = SplitMix64::new(5);
    let x: Vec<f64> = (0..4096).map(|_| rng.gaussian()).collect();
    let whole = band_energy(&x, 16_000, 0.0, 8000.0).unwrap();
    // split on a bin boundary so no bin is counted twice
    let df = 16_000.0 / 4096.0;
    let split = 100.0 * df;
    let lo = band_energy(&x, 16_000, 0.0, split).unwrap();
    let hi = band_energy(&x, 16_000, split + df / 2.0, 8000.0).unwrap();
    assert!(((lo + hi) / whole - 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn fft_is_homogeneous(seed in any::<u64>(), a in 0.0f64..20.0) {
        let mut rng = SplitMix64::new(seed);
        let x: Vec<f64> = (0..256).map(|_| rng.uniform(-1000.0, 1000.0)).collect();
        let scaled: Vec<f64> = x.iter().map(|v| a * v).collect();
        let m = fft_magnitudes(&x).unwrap().magnitudes;
        let ms = fft_magnitudes(&scaled).unwrap().magnitudes;
        for (u, v) in m.iter().zip(&ms) {
            prop_assert!((a * u - v).abs() <= 1e-9 * (a * u).abs().max(1e-9));
        }
    }

    #[test]
    fn frame_parseval(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let x: Vec<f64> = (0..256).map(|_| rng.uniform(-1000.0, 1000.0)).collect();
        let m = fft_magnitudes(&x).unwrap().magnitudes;
        // undo the one-sided scaling: |X_k|^2 / N summed over all N bins
        let n = 256.0;
        let mut energy = m[0] * m[0] * n + m[128] * m[128] * n;
        for mk in &m[1..128] {
            energy += 2.0 * (mk * n / 2.0).powi(2) / n;
        }
        let time: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((energy / time - 1.0).abs() < 1e-9);
    }

    #[test]
    fn narrow_features_prefix_wide(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let frame = random_frame(&mut rng);
        let narrow = extract_features(&frame, 0.0, 375.0).unwrap().values;
        let wide = extract_features(&frame, 0.0, 500.0).unwrap().values;
        prop_assert_eq!(narrow.len(), 7);
        prop_assert_eq!(&wide[..7], &narrow[..]);
    }
}
