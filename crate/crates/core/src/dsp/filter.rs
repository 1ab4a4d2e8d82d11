//! Windowed-sinc FIR low-pass design and zero-phase (delay-compensated)
//! application.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub cutoff_hz: f64,
    pub sample_rate: u32,
    /// Odd, so the group delay `(taps - 1) / 2` is a whole number of samples.
    pub taps: usize,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self { cutoff_hz: 375.0, sample_rate: 16_000, taps: 255 }
    }
}

impl FilterSpec {
    pub fn lowpass(cutoff_hz: f64) -> Self {
        Self { cutoff_hz, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let nyquist = f64::from(self.sample_rate) / 2.0;
        if !(self.cutoff_hz > 0.0 && self.cutoff_hz < nyquist) {
            return Err(Error::InvalidSpec(format!("cutoff {} Hz outside (0, {nyquist})", self.cutoff_hz)));
        }
        if self.taps.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!("tap count {} must be odd", self.taps)));
        }
        Ok(())
    }
}

/// Hamming-windowed sinc coefficients with unity DC gain.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterKernel {
    pub spec: FilterSpec,
    pub taps: Vec<f64>,
}

impl FilterKernel {
    pub fn group_delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }

    /// Magnitude of the DTFT at `freq_hz`.
    pub fn response(&self, freq_hz: f64) -> f64 {
        let omega = 2.0 * PI * freq_hz / f64::from(self.spec.sample_rate);
        let (mut re, mut im) = (0.0, 0.0);
        for (n, &h) in self.taps.iter().enumerate() {
            let phase = omega * n as f64;
            re += h * phase.cos();
            im -= h * phase.sin();
        }
        re.hypot(im)
    }

    pub fn response_db(&self, freq_hz: f64) -> f64 {
        20.0 * self.response(freq_hz).max(1e-300).log10()
    }
}

pub fn design_lowpass(spec: FilterSpec) -> Result<FilterKernel> {
    spec.validate()?;
    let n = spec.taps;
    let mid = (n - 1) as f64 / 2.0;
    let fc = spec.cutoff_hz / f64::from(spec.sample_rate);

    let mut taps: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 - mid;
            let sinc = if t == 0.0 { 2.0 * fc } else { (2.0 * PI * fc * t).sin() / (PI * t) };
            let window = if n == 1 { 1.0 } else { 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos() };
            sinc * window
        })
        .collect();

    let sum: f64 = taps.iter().sum();
    for h in &mut taps {
        *h /= sum;
    }
    // exact symmetry regardless of rounding in cos()
    for i in 0..n / 2 {
        let avg = 0.5 * (taps[i] + taps[n - 1 - i]);
        taps[i] = avg;
        taps[n - 1 - i] = avg;
    }
    Ok(FilterKernel { spec, taps })
}

/// Direct-form convolution, shifted back by the group delay so output sample
/// `i` lines up with input sample `i`. Samples beyond either edge are zero.
pub fn apply_filter<T: Copy + Into<f64>>(kernel: &FilterKernel, samples: &[T]) -> Result<Vec<f64>> {
    let taps = &kernel.taps;
    if samples.len() < taps.len() {
        return Err(Error::InputTooShort { needed: taps.len(), got: samples.len() });
    }
    let delay = kernel.group_delay();
    let n = taps.len();
    // y[i] = sum_j h[j] * x[i + delay - j], rewritten as a sliding dot product
    // of the reversed kernel over the zero-padded input
    let reversed: Vec<f64> = taps.iter().rev().copied().collect();
    let mut padded = vec![0.0; samples.len() + n - 1];
    for (dst, &s) in padded[delay..].iter_mut().zip(samples) {
        *dst = s.into();
    }

    let out = (0..samples.len()).map(|i| dot(&reversed, &padded[i..i + n])).collect();
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 8];
    let chunks = a.len() / 8 * 8;
    for (ca, cb) in a[..chunks].chunks_exact(8).zip(b[..chunks].chunks_exact(8)) {
        for k in 0..8 {
            acc[k] += ca[k] * cb[k];
        }
    }
    let rest: f64 = a[chunks..].iter().zip(&b[chunks..]).map(|(x, y)| x * y).sum();
    acc.iter().sum::<f64>() + rest
}
