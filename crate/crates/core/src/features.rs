//! Labeled feature rows and their CSV form.
//!
//! Header: `t_ms,f0,...,fK,airflow_mps,vent_on`. Floats are written in
//! shortest round-trip form so a write/read cycle is lossless.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use crate::audio::{frame_slices, AudioClip, FRAME_LEN};
use crate::dsp::{apply_filter, design_lowpass, extract_features, feature_len, FeatureVector, FilterSpec};
use crate::error::{Error, Result};
use crate::gbdt::Dataset;
use crate::rng::SplitMix64;
use crate::silence::{is_silent, SilenceConfig};
use crate::synth::{GroundTruth, TruthFrame};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: FeatureVector,
    pub airflow_mps: f64,
    pub vent_on: u8,
}

/// A clip together with its per-frame labels; features can be re-extracted
/// from it at any cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledClip {
    pub clip: AudioClip,
    pub truth: GroundTruth,
}

impl LabeledClip {
    pub fn samples(&self, cutoff_hz: f64, opts: &ExtractOptions) -> Result<Vec<LabeledSample>> {
        labeled_samples(&self.clip, &self.truth, cutoff_hz, opts)
    }
}

/// Which frames become labeled samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Skip frames whose raw audio is louder than the threshold.
    pub gate: Option<SilenceConfig>,
    /// Skip frames next to a change in the airflow label. The filter's
    /// impulse response reaches half a frame into each neighbor, so these
    /// frames mix audio from both sides of the change.
    pub skip_transitions: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { gate: None, skip_transitions: true }
    }
}

impl ExtractOptions {
    /// Every frame, no gate.
    pub fn all_frames() -> Self {
        Self { gate: None, skip_transitions: false }
    }
}

/// True for frames bordering a frame with a different airflow label.
pub fn transition_frames(truth: &GroundTruth) -> Vec<bool> {
    let f = &truth.frames;
    (0..f.len())
        .map(|i| {
            let differs = |j: usize| f[j].airflow_mps != f[i].airflow_mps;
            (i > 0 && differs(i - 1)) || (i + 1 < f.len() && differs(i + 1))
        })
        .collect()
}

/// Low-passes the whole clip at `cutoff_hz`, re-frames it and pairs each
/// frame's features with its label.
pub fn labeled_samples(
    clip: &AudioClip,
    truth: &GroundTruth,
    cutoff_hz: f64,
    opts: &ExtractOptions,
) -> Result<Vec<LabeledSample>> {
    clip.ensure_pipeline_rate()?;
    feature_len(cutoff_hz)?;
    let raw = frame_slices(&clip.samples, FRAME_LEN, clip.sample_rate);
    if raw.len() != truth.len() {
        return Err(Error::LengthMismatch { left: raw.len(), right: truth.len() });
    }
    let kernel = design_lowpass(FilterSpec::lowpass(cutoff_hz))?;
    let filtered = apply_filter(&kernel, &clip.samples)?;
    let filtered = frame_slices(&filtered, FRAME_LEN, clip.sample_rate);
    let transition = transition_frames(truth);

    let mut out = Vec::with_capacity(raw.len());
    for ((raw, frame), label) in raw.iter().zip(&filtered).zip(&truth.frames) {
        if opts.skip_transitions && transition[raw.index] {
            continue;
        }
        if let Some(cfg) = &opts.gate {
            if !is_silent(raw.samples, cfg)? {
                continue;
            }
        }
        out.push(LabeledSample {
            features: extract_features(frame.samples, frame.start_ms, cutoff_hz)?,
            airflow_mps: label.airflow_mps,
            vent_on: label.vent_on,
        });
    }
    Ok(out)
}

/// Which label a model is trained against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Airflow,
    VentOn,
}

pub fn to_dataset(samples: &[LabeledSample], target: Target) -> Result<Dataset> {
    let rows = samples.iter().map(|s| s.features.values.clone()).collect();
    let targets = samples
        .iter()
        .map(|s| match target {
            Target::Airflow => s.airflow_mps,
            Target::VentOn => f64::from(s.vent_on),
        })
        .collect();
    Dataset::new(rows, targets)
}

/// Deterministic shuffled split; returns `(train, test)` with
/// `round(len * test_fraction)` rows in the test part. Row order within each
/// part follows the original order.
pub fn train_test_split<T: Clone>(items: &[T], test_fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::InvalidSpec(format!("test fraction must be in [0, 1), got {test_fraction}")));
    }
    let n_test = (items.len() as f64 * test_fraction).round() as usize;
    let mut order: Vec<usize> = (0..items.len()).collect();
    SplitMix64::new(seed).shuffle(&mut order);
    let mut is_test = vec![false; items.len()];
    for &i in &order[..n_test] {
        is_test[i] = true;
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (item, test_row) in items.iter().zip(is_test) {
        if test_row {
            test.push(item.clone());
        } else {
            train.push(item.clone());
        }
    }
    Ok((train, test))
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::MalformedCsv(format!("{other:?}")),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => Error::NotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

pub fn write_samples<W: Write>(out: W, samples: &[LabeledSample]) -> Result<()> {
    let width = samples.first().map_or(0, |s| s.features.values.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t_ms".to_string()];
    header.extend((0..width).map(|k| format!("f{k}")));
    header.extend(["airflow_mps".to_string(), "vent_on".to_string()]);
    w.write_record(&header).map_err(csv_error)?;
    for s in samples {
        if s.features.values.len() != width {
            return Err(Error::FeatureLengthMismatch { expected: width, got: s.features.values.len() });
        }
        let mut record = vec![s.features.start_ms.to_string()];
        record.extend(s.features.values.iter().map(f64::to_string));
        record.push(s.airflow_mps.to_string());
        record.push(s.vent_on.to_string());
        w.write_record(&record).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples<R: Read>(input: R) -> Result<Vec<LabeledSample>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = header.iter().collect();
    let width = names
        .len()
        .checked_sub(3)
        .ok_or_else(|| Error::MalformedCsv(format!("feature header too short: {}", names.join(","))))?;
    let expected: Vec<String> = std::iter::once("t_ms".to_string())
        .chain((0..width).map(|k| format!("f{k}")))
        .chain(["airflow_mps".to_string(), "vent_on".to_string()])
        .collect();
    if names != expected {
        return Err(Error::MalformedCsv(format!("unexpected feature header: {}", names.join(","))));
    }

    let mut out = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let num = |col: usize| -> Result<f64> {
            let field = &record[col];
            field.parse::<f64>().map_err(|_| {
                Error::MalformedCsv(format!("row {}: column {} is not a number: {field:?}", line + 1, names[col]))
            })
        };
        let values = (1..=width).map(num).collect::<Result<Vec<_>>>()?;
        let vent_on = match &record[width + 2] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::MalformedCsv(format!("row {}: vent_on must be 0 or 1, got {other:?}", line + 1)))
            }
        };
        out.push(LabeledSample {
            features: FeatureVector { start_ms: num(0)?, values },
            airflow_mps: num(width + 1)?,
            vent_on,
        });
    }
    Ok(out)
}

pub fn save_samples(path: impl AsRef<Path>, samples: &[LabeledSample]) -> Result<()> {
    write_samples(File::create(path)?, samples)
}

pub fn load_samples(path: impl AsRef<Path>) -> Result<Vec<LabeledSample>> {
    read_samples(open(path.as_ref())?)
}

/// Ground-truth CSV: `t_ms,airflow_mps,vent_on`, one row per frame.
pub fn write_truth<W: Write>(out: W, truth: &GroundTruth) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t_ms", "airflow_mps", "vent_on"]).map_err(csv_error)?;
    for f in &truth.frames {
        w.write_record([f.start_ms.to_string(), f.airflow_mps.to_string(), f.vent_on.to_string()])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_truth<R: Read>(input: R) -> Result<GroundTruth> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().collect::<Vec<_>>() != ["t_ms", "airflow_mps", "vent_on"] {
        return Err(Error::MalformedCsv(format!(
            "unexpected label header: {}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut frames = Vec::new();
    for (frame_index, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let parse = |col: usize| {
            record[col]
                .parse::<f64>()
                .map_err(|_| Error::MalformedCsv(format!("row {}: bad number {:?}", frame_index + 1, &record[col])))
        };
        let vent_on = parse(2)?;
        if vent_on != 0.0 && vent_on != 1.0 {
            return Err(Error::NonBinaryLabels(vent_on));
        }
        frames.push(TruthFrame { frame_index, start_ms: parse(0)?, airflow_mps: parse(1)?, vent_on: vent_on as u8 });
    }
    Ok(GroundTruth { frames })
}

pub fn save_truth(path: impl AsRef<Path>, truth: &GroundTruth) -> Result<()> {
    write_truth(File::create(path)?, truth)
}

pub fn load_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    read_truth(open(path.as_ref())?)
}
