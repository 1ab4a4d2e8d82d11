//! Frame-level silence gate.
//!
//! The threshold is the loudest RMS the vent itself produces, so a frame at or
//! below it contains nothing louder than airflow and is kept for analysis.
//! Louder frames (speech, slams, music) are discarded before any filtering.

use crate::dsp::rms;
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD_RMS: f64 = 60.0;

/// Threshold in raw 16-bit PCM amplitude units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SilenceConfig {
    pub threshold_rms: f64,
}

impl Default for SilenceConfig {
    fn default() -> Self {
        Self { threshold_rms: DEFAULT_THRESHOLD_RMS }
    }
}

impl SilenceConfig {
    pub fn new(threshold_rms: f64) -> Result<Self> {
        if !(threshold_rms > 0.0 && threshold_rms.is_finite()) {
            return Err(Error::InvalidSpec(format!("silence threshold must be positive, got {threshold_rms}")));
        }
        Ok(Self { threshold_rms })
    }
}

/// `rms(frame) <= threshold`; the boundary counts as silent.
pub fn is_silent<T: Copy + Into<f64>>(frame: &[T], cfg: &SilenceConfig) -> Result<bool> {
    Ok(rms(frame)? <= cfg.threshold_rms)
}
