//! Labeled synthetic indoor scenes: vent airflow plus optional interference.
//!
//! Airflow is white Gaussian noise shaped to 0-500 Hz with the crate's own FIR
//! designer, scaled so its RMS is `gain_per_mps * rate^1.5`. Interference
//! sources are added on top, optionally switched on and off in random bursts.
//! Everything derives from one seed through [`SplitMix64`].
//!
//! Scenes are described in TOML:
//!
//! ```toml
//! duration_s = 20.0
//! seed = 7
//! gain_per_mps = 4.0
//!
//! [[flow]]
//! start_s = 0.0
//! airflow_mps = 0.0
//!
//! [[flow]]
//! start_s = 10.0
//! airflow_mps = 3.5
//!
//! [[interference]]
//! kind = "speech_band"
//! rms_target = 500.0
//! burst = { on_s = [0.2, 0.8], off_s = [0.3, 1.2] }
//! ```

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::audio::{quantize, AudioClip, FRAME_LEN, PIPELINE_SAMPLE_RATE};
use crate::dsp::{apply_filter, design_lowpass, FilterSpec};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub const DEFAULT_GAIN_PER_MPS: f64 = 4.0;
/// Upper edge of the synthetic airflow spectrum.
pub const AIRFLOW_BAND_HZ: f64 = 500.0;
const SHAPING_TAPS: usize = 255;

fn default_gain() -> f64 {
    DEFAULT_GAIN_PER_MPS
}

/// Airflow from `start_s` until the next segment starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSegment {
    pub start_s: f64,
    pub airflow_mps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceKind {
    /// Band-limited noise, 200-3000 Hz unless overridden.
    SpeechBand,
    /// White noise over the whole spectrum.
    Broadband,
    /// Harmonics of `band.0` up to `band.1` (default 60-300 Hz).
    LowHum,
}

impl InterferenceKind {
    pub fn default_band(self) -> (f64, f64) {
        match self {
            InterferenceKind::SpeechBand => (200.0, 3000.0),
            InterferenceKind::Broadband => (0.0, f64::from(PIPELINE_SAMPLE_RATE) / 2.0),
            InterferenceKind::LowHum => (60.0, 300.0),
        }
    }
}

/// Alternating on/off durations, each drawn uniformly from its range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Burst {
    pub on_s: (f64, f64),
    pub off_s: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceSpec {
    pub kind: InterferenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<(f64, f64)>,
    pub rms_target: f64,
    /// Absent means continuous.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burst: Option<Burst>,
}

impl InterferenceSpec {
    pub fn band(&self) -> (f64, f64) {
        self.band.unwrap_or_else(|| self.kind.default_band())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub duration_s: f64,
    pub seed: u64,
    #[serde(default = "default_gain")]
    pub gain_per_mps: f64,
    pub flow: Vec<FlowSegment>,
    #[serde(default)]
    pub interference: Vec<InterferenceSpec>,
}

impl SceneSpec {
    /// Constant airflow for the whole scene, no interference.
    pub fn steady(duration_s: f64, airflow_mps: f64, seed: u64) -> Self {
        Self {
            duration_s,
            seed,
            gain_per_mps: DEFAULT_GAIN_PER_MPS,
            flow: vec![FlowSegment { start_s: 0.0, airflow_mps }],
            interference: Vec::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&read_spec_file(path.as_ref())?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.duration_s >= 1.0 && self.duration_s.is_finite()) {
            return bad(format!("duration_s must be >= 1, got {}", self.duration_s));
        }
        if !(self.gain_per_mps >= 0.0 && self.gain_per_mps.is_finite()) {
            return bad(format!("gain_per_mps must be >= 0, got {}", self.gain_per_mps));
        }
        let Some(first) = self.flow.first() else {
            return bad("flow profile is empty".into());
        };
        if first.start_s != 0.0 {
            return bad(format!("flow profile must start at 0 s, starts at {}", first.start_s));
        }
        for pair in self.flow.windows(2) {
            if pair[1].start_s.partial_cmp(&pair[0].start_s) != Some(std::cmp::Ordering::Greater) {
                return bad(format!("flow segments overlap or are out of order at {} s", pair[1].start_s));
            }
        }
        for seg in &self.flow {
            if seg.start_s >= self.duration_s {
                return bad(format!("flow segment at {} s starts after the scene ends", seg.start_s));
            }
            if !(seg.airflow_mps >= 0.0 && seg.airflow_mps.is_finite()) {
                return bad(format!("negative or non-finite airflow {}", seg.airflow_mps));
            }
        }
        let nyquist = f64::from(PIPELINE_SAMPLE_RATE) / 2.0;
        for src in &self.interference {
            let (lo, hi) = src.band();
            if !(lo >= 0.0 && lo < hi && hi <= nyquist) {
                return bad(format!("interference band ({lo}, {hi}) invalid"));
            }
            if src.kind == InterferenceKind::LowHum && lo <= 0.0 {
                return bad("low_hum needs a positive fundamental".into());
            }
            if !(src.rms_target >= 0.0 && src.rms_target.is_finite()) {
                return bad(format!("rms_target {} invalid", src.rms_target));
            }
            if let Some(b) = src.burst {
                for (lo, hi) in [b.on_s, b.off_s] {
                    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                        return bad(format!("burst range ({lo}, {hi}) invalid"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Airflow in effect at time `t_s`.
    pub fn airflow_at(&self, t_s: f64) -> f64 {
        self.flow.iter().rev().find(|seg| seg.start_s <= t_s).map_or(0.0, |seg| seg.airflow_mps)
    }

    pub fn sample_count(&self) -> usize {
        (self.duration_s * f64::from(PIPELINE_SAMPLE_RATE)).round() as usize
    }
}

/// Several scenes in one TOML file, each under `[[scene]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub scene: Vec<SceneSpec>,
}

impl Corpus {
    /// Accepts either a `[[scene]]` list or a single scene.
    pub fn from_toml(text: &str) -> Result<Self> {
        let value: toml::Table = toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        let corpus = if value.contains_key("scene") {
            toml::from_str::<Corpus>(text).map_err(|e| Error::InvalidSpec(e.to_string()))?
        } else {
            Corpus { scene: vec![SceneSpec::from_toml(text)?] }
        };
        if corpus.scene.is_empty() {
            return Err(Error::InvalidSpec("corpus has no scenes".into()));
        }
        for spec in &corpus.scene {
            spec.validate()?;
        }
        Ok(corpus)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&read_spec_file(path.as_ref())?)
    }

    /// Synthesizes every scene, in parallel, preserving order.
    pub fn synthesize(&self) -> Result<Vec<crate::features::LabeledClip>> {
        use rayon::prelude::*;
        self.scene
            .par_iter()
            .map(|spec| {
                let (clip, truth) = synth_scene(spec)?;
                Ok(crate::features::LabeledClip { clip, truth })
            })
            .collect()
    }
}

fn read_spec_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::NotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

/// Label for one analysis frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthFrame {
    pub frame_index: usize,
    pub start_ms: f64,
    pub airflow_mps: f64,
    pub vent_on: u8,
}

/// Per-frame labels; one entry per full 256-sample frame of the clip.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    pub frames: Vec<TruthFrame>,
}

impl GroundTruth {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Generates the clip and its per-frame labels.
pub fn synth_scene(spec: &SceneSpec) -> Result<(AudioClip, GroundTruth)> {
    spec.validate()?;
    let len = spec.sample_count();
    let rate = f64::from(PIPELINE_SAMPLE_RATE);
    let mut rng = SplitMix64::new(spec.seed);

    let mut airflow_rng = rng.fork();
    let shape = unit_band_noise(&mut airflow_rng, len, 0.0, AIRFLOW_BAND_HZ)?;
    let mut mix: Vec<f64> = shape
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let r = spec.airflow_at(i as f64 / rate);
            x * spec.gain_per_mps * r.powf(1.5)
        })
        .collect();

    for src in &spec.interference {
        let mut src_rng = rng.fork();
        let component = interference(&mut src_rng, src, len)?;
        for (m, c) in mix.iter_mut().zip(component) {
            *m += c;
        }
    }

    let clip = AudioClip::new(PIPELINE_SAMPLE_RATE, quantize(&mix));
    let frames = (0..len / FRAME_LEN)
        .map(|frame_index| {
            let start_ms = crate::audio::frame_start_ms(frame_index, FRAME_LEN, PIPELINE_SAMPLE_RATE);
            let airflow_mps = spec.airflow_at(start_ms / 1000.0);
            TruthFrame { frame_index, start_ms, airflow_mps, vent_on: u8::from(airflow_mps > 0.0) }
        })
        .collect();
    Ok((clip, GroundTruth { frames }))
}

/// Gaussian noise restricted to `[lo, hi]` with unit expected variance.
fn unit_band_noise(rng: &mut SplitMix64, len: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let nyquist = f64::from(PIPELINE_SAMPLE_RATE) / 2.0;
    let mut kernel = vec![0.0; SHAPING_TAPS];
    kernel[SHAPING_TAPS / 2] = 1.0;
    if hi < nyquist {
        kernel =
            design_lowpass(FilterSpec { cutoff_hz: hi, sample_rate: PIPELINE_SAMPLE_RATE, taps: SHAPING_TAPS })?.taps;
    }
    if lo > 0.0 {
        let low = design_lowpass(FilterSpec { cutoff_hz: lo, sample_rate: PIPELINE_SAMPLE_RATE, taps: SHAPING_TAPS })?;
        for (k, l) in kernel.iter_mut().zip(&low.taps) {
            *k -= l;
        }
    }
    let energy: f64 = kernel.iter().map(|h| h * h).sum();
    let scale = 1.0 / energy.sqrt();

    // pad so the kept span never sees the filter's zero-padded edges
    let pad = SHAPING_TAPS / 2;
    let white: Vec<f64> = (0..len + 2 * pad).map(|_| rng.gaussian()).collect();
    let shaped = crate::dsp::FilterKernel { spec: FilterSpec::default(), taps: kernel };
    let shaped = apply_filter(&shaped, &white)?;
    Ok(shaped[pad..pad + len].iter().map(|x| x * scale).collect())
}

fn interference(rng: &mut SplitMix64, src: &InterferenceSpec, len: usize) -> Result<Vec<f64>> {
    let rate = f64::from(PIPELINE_SAMPLE_RATE);
    let (lo, hi) = src.band();
    let mut signal = match src.kind {
        InterferenceKind::SpeechBand => unit_band_noise(rng, len, lo, hi)?,
        InterferenceKind::Broadband => (0..len).map(|_| rng.gaussian()).collect(),
        InterferenceKind::LowHum => {
            let harmonics: Vec<(f64, f64)> =
                (1..).map(|k| k as f64 * lo).take_while(|&f| f <= hi).map(|f| (f, rng.uniform(0.0, TAU))).collect();
            // equal-amplitude harmonics, unit RMS overall
            let amp = (2.0 / harmonics.len() as f64).sqrt();
            (0..len)
                .map(|i| {
                    let t = i as f64 / rate;
                    harmonics.iter().map(|&(f, phase)| amp * (TAU * f * t + phase).sin()).sum()
                })
                .collect()
        }
    };
    for v in &mut signal {
        *v *= src.rms_target;
    }
    if let Some(burst) = src.burst {
        let gate = burst_gate(rng, &burst, len);
        for (v, on) in signal.iter_mut().zip(gate) {
            if !on {
                *v = 0.0;
            }
        }
    }
    Ok(signal)
}

fn burst_gate(rng: &mut SplitMix64, burst: &Burst, len: usize) -> Vec<bool> {
    let rate = f64::from(PIPELINE_SAMPLE_RATE);
    let mut gate = Vec::with_capacity(len);
    let mut on = rng.next_f64() < 0.5;
    while gate.len() < len {
        let (lo, hi) = if on { burst.on_s } else { burst.off_s };
        let samples = ((rng.uniform(lo, hi) * rate).round() as usize).max(1);
        let take = samples.min(len - gate.len());
        gate.extend(std::iter::repeat_n(on, take));
        on = !on;
    }
    gate
}
