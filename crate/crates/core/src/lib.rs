//! Acoustic airflow sensing for HVAC vents.
//!
//! A clip is cut into 256-sample frames at 16 kHz. Quiet frames pass the
//! silence gate, are low-passed, and reduced to a few low-frequency FFT
//! magnitudes. Gradient-boosted trees turn those into a vent-on probability
//! and an airflow estimate, and minimum persistent smoothing cleans up the
//! airflow stream.

pub mod audio;
pub mod cli;
pub mod dsp;
pub mod error;
pub mod features;
pub mod gbdt;
pub mod metrics;
pub mod mps;
pub mod pipeline;
pub mod privacy;
pub mod rng;
pub mod silence;
pub mod synth;

pub use error::{Error, Result};
