//! How much audible content survives the low-pass filter.

use std::fmt;

use crate::audio::{quantize, AudioClip};
use crate::dsp::{apply_filter, band_energy, design_lowpass, FilterSpec};
use crate::error::{Error, Result};

pub const DEFAULT_SPLIT_HZ: f64 = 400.0;

/// Band energies on either side of `split_hz`, before and after filtering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyReport {
    pub cutoff_hz: f64,
    pub split_hz: f64,
    pub below_before: f64,
    pub above_before: f64,
    pub below_after: f64,
    pub above_after: f64,
}

impl PrivacyReport {
    /// Reduction of the energy above the split, in dB. Infinite when nothing
    /// is left above the split.
    pub fn attenuation_db(&self) -> f64 {
        10.0 * (self.above_before / self.above_after).log10()
    }

    /// Reduction of the energy below the split, in dB.
    pub fn passband_loss_db(&self) -> f64 {
        10.0 * (self.below_before / self.below_after).log10()
    }
}

impl fmt::Display for PrivacyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cutoff_hz {}  split_hz {}", self.cutoff_hz, self.split_hz)?;
        writeln!(f, "band        before          after")?;
        writeln!(f, "below   {:>14.6e} {:>14.6e}", self.below_before, self.below_after)?;
        writeln!(f, "above   {:>14.6e} {:>14.6e}", self.above_before, self.above_after)?;
        writeln!(f, "passband loss {:.2} dB", self.passband_loss_db())?;
        write!(f, "attenuation above split {:.2} dB", self.attenuation_db())
    }
}

/// Low-passes the clip and compares band energies. The reported "after"
/// energies are measured on the filtered signal before quantization to
/// 16 bits; the returned clip is the quantized one.
pub fn privacy_report(clip: &AudioClip, cutoff_hz: f64, split_hz: f64) -> Result<(AudioClip, PrivacyReport)> {
    let rate = clip.sample_rate;
    let nyquist = f64::from(rate) / 2.0;
    if !(split_hz > 0.0 && split_hz < nyquist) {
        return Err(Error::InvalidBand { lo: split_hz, hi: nyquist });
    }
    let kernel = design_lowpass(FilterSpec { cutoff_hz, sample_rate: rate, ..FilterSpec::default() })?;
    let filtered = apply_filter(&kernel, &clip.samples)?;
    let report = PrivacyReport {
        cutoff_hz,
        split_hz,
        below_before: band_energy(&clip.samples, rate, 0.0, split_hz)?,
        above_before: band_energy(&clip.samples, rate, split_hz, nyquist)?,
        below_after: band_energy(&filtered, rate, 0.0, split_hz)?,
        above_after: band_energy(&filtered, rate, split_hz, nyquist)?,
    };
    Ok((AudioClip::new(rate, quantize(&filtered)), report))
}
