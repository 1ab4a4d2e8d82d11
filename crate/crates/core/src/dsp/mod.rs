//! Signal math: RMS, low-pass filtering, 256-point spectra, low-frequency
//! feature vectors and band energy.

mod fft;
mod filter;

use std::sync::OnceLock;

pub use fft::{Complex, Radix2Fft};
pub use filter::{apply_filter, design_lowpass, FilterKernel, FilterSpec};

use crate::audio::FRAME_LEN;
use crate::error::{Error, Result};

/// Width of one FFT bin at 16 kHz / 256 samples.
pub const BIN_HZ: f64 = 62.5;
/// One-sided bins 0..=128 of a 256-point transform.
pub const SPECTRUM_BINS: usize = FRAME_LEN / 2 + 1;
pub const DEFAULT_CUTOFF_HZ: f64 = 375.0;
pub const MIN_CUTOFF_HZ: f64 = 62.5;
pub const MAX_CUTOFF_HZ: f64 = 500.0;

/// The eight cutoffs a sweep can exercise, 62.5 Hz apart.
pub const CANDIDATE_CUTOFFS: [f64; 8] = [62.5, 125.0, 187.5, 250.0, 312.5, 375.0, 437.5, 500.0];

pub fn rms<T: Copy + Into<f64>>(samples: &[T]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum_sq: f64 = samples
        .iter()
        .map(|&s| {
            let v: f64 = s.into();
            v * v
        })
        .sum();
    Ok((sum_sq / samples.len() as f64).sqrt())
}

/// One-sided magnitude spectrum of a 256-sample frame.
///
/// Normalized so an exact-bin sinusoid of amplitude `A` reads `A`:
/// `|X_0| / 256` and `|X_128| / 256` at the ends, `2 |X_k| / 256` between.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    pub const BIN_HZ: f64 = BIN_HZ;

    pub fn bin_frequency(k: usize) -> f64 {
        k as f64 * BIN_HZ
    }
}

fn frame_fft() -> &'static Radix2Fft {
    static PLAN: OnceLock<Radix2Fft> = OnceLock::new();
    PLAN.get_or_init(|| Radix2Fft::new(FRAME_LEN))
}

pub fn fft_magnitudes<T: Copy + Into<f64>>(frame: &[T]) -> Result<Spectrum> {
    if frame.len() != FRAME_LEN {
        return Err(Error::WrongFrameLength { expected: FRAME_LEN, got: frame.len() });
    }
    let spectrum = frame_fft().process_real(frame);
    let n = FRAME_LEN as f64;
    let magnitudes = spectrum[..SPECTRUM_BINS]
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let scale = if k == 0 || k == FRAME_LEN / 2 { 1.0 } else { 2.0 };
            scale * c.norm() / n
        })
        .collect();
    Ok(Spectrum { magnitudes })
}

/// Number of feature bins at a cutoff: bins `0..=floor(cutoff / 62.5)`.
pub fn feature_len(cutoff_hz: f64) -> Result<usize> {
    validate_cutoff(cutoff_hz)?;
    Ok((cutoff_hz / BIN_HZ).floor() as usize + 1)
}

/// Cutoffs must sit on a bin edge between 62.5 and 500 Hz.
pub fn validate_cutoff(cutoff_hz: f64) -> Result<()> {
    let bins = cutoff_hz / BIN_HZ;
    if !(MIN_CUTOFF_HZ..=MAX_CUTOFF_HZ).contains(&cutoff_hz) || bins.fract() != 0.0 {
        return Err(Error::InvalidCutoff(cutoff_hz));
    }
    Ok(())
}

/// Low-frequency magnitudes of one frame, tagged with the frame start time.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub start_ms: f64,
    pub values: Vec<f64>,
}

pub fn extract_features<T: Copy + Into<f64>>(frame: &[T], start_ms: f64, cutoff_hz: f64) -> Result<FeatureVector> {
    let len = feature_len(cutoff_hz)?;
    let mut values = fft_magnitudes(frame)?.magnitudes;
    values.truncate(len);
    Ok(FeatureVector { start_ms, values })
}

/// Energy inside `[lo_hz, hi_hz]`, computed from a zero-padded whole-signal
/// FFT and scaled so the full band equals the time-domain sum of squares.
pub fn band_energy<T: Copy + Into<f64>>(samples: &[T], sample_rate: u32, lo_hz: f64, hi_hz: f64) -> Result<f64> {
    let nyquist = f64::from(sample_rate) / 2.0;
    if !(lo_hz >= 0.0 && lo_hz < hi_hz && hi_hz <= nyquist) {
        return Err(Error::InvalidBand { lo: lo_hz, hi: hi_hz });
    }
    if samples.is_empty() {
        return Ok(0.0);
    }
    let m = samples.len().next_power_of_two().max(2);
    let spectrum = Radix2Fft::new(m).process_real(samples);
    let df = f64::from(sample_rate) / m as f64;

    let energy = spectrum[..=m / 2]
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let f = *k as f64 * df;
            f >= lo_hz && f <= hi_hz
        })
        .map(|(k, c)| {
            let weight = if k == 0 || k == m / 2 { 1.0 } else { 2.0 };
            weight * c.norm_sqr()
        })
        .sum::<f64>();
    Ok(energy / m as f64)
}
