//! End-to-end inference: duty window, silence gate, low-pass, features,
//! models, then minimum persistent smoothing of the airflow stream.
//!
//! The gate looks at raw frames. Frames that fail it (or fall outside the
//! duty window) are zeroed before the single whole-clip filter pass, so their
//! audio never reaches the filter.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::audio::{frame_slices, AudioClip, FRAME_LEN, PIPELINE_SAMPLE_RATE};
use crate::dsp::{apply_filter, design_lowpass, extract_features, feature_len, FilterSpec, DEFAULT_CUTOFF_HZ};
use crate::error::{Error, Result};
use crate::features::{to_dataset, ExtractOptions, LabeledClip, LabeledSample, Target};
use crate::gbdt::{GbdtModel, HyperParams, Task};
use crate::metrics::mse;
use crate::mps::{mps_stream, MpsOutcome, MpsParams};
use crate::silence::{is_silent, SilenceConfig};

/// Probability at or above which the vent is reported on.
pub const VENT_THRESHOLD: f64 = 0.5;

/// Sense for `sense_s` out of every `interval_s`, starting at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutyCycle {
    pub sense_s: f64,
    pub interval_s: f64,
}

impl DutyCycle {
    pub fn new(sense_s: f64, interval_s: f64) -> Result<Self> {
        let d = Self { sense_s, interval_s };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sense_s > 0.0 && self.sense_s <= self.interval_s && self.interval_s.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "duty cycle needs 0 < sense_s <= interval_s, got {},{}",
                self.sense_s, self.interval_s
            )));
        }
        Ok(())
    }

    /// Whether a frame starting at `start_ms` lies inside a sensing window.
    pub fn covers(&self, start_ms: f64) -> bool {
        if self.sense_s >= self.interval_s {
            return true;
        }
        (start_ms / 1000.0).rem_euclid(self.interval_s) < self.sense_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub cutoff_hz: f64,
    pub silence: SilenceConfig,
    /// `None` disables smoothing.
    pub mps: Option<MpsParams>,
    pub duty: Option<DutyCycle>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            cutoff_hz: DEFAULT_CUTOFF_HZ,
            silence: SilenceConfig::default(),
            mps: Some(MpsParams::default()),
            duty: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        feature_len(self.cutoff_hz)?;
        SilenceConfig::new(self.silence.threshold_rms)?;
        if let Some(mps) = &self.mps {
            mps.validate()?;
        }
        if let Some(duty) = &self.duty {
            duty.validate()?;
        }
        Ok(())
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sample_rate={} frame_len={} cutoff_hz={} silence_threshold={}",
            PIPELINE_SAMPLE_RATE, FRAME_LEN, self.cutoff_hz, self.silence.threshold_rms
        )?;
        match &self.mps {
            Some(m) => write!(f, " mps=n={},p={},eps={}", m.n, m.p, m.epsilon)?,
            None => write!(f, " mps=off")?,
        }
        match &self.duty {
            Some(d) => write!(f, " duty={},{}", d.sense_s, d.interval_s),
            None => write!(f, " duty=off"),
        }
    }
}

/// Model outputs for one frame that passed the duty window and the gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaivePrediction {
    pub frame_index: usize,
    pub start_ms: f64,
    pub vent_prob: f64,
    pub airflow_mps: f64,
}

impl NaivePrediction {
    pub fn vent_on(&self) -> u8 {
        u8::from(self.vent_prob >= VENT_THRESHOLD)
    }
}

/// One smoothing batch and the time it spans, from the first frame's start
/// to the last frame's end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedPrediction {
    pub batch: usize,
    /// Index of the batch's first entry in the naive series.
    pub first: usize,
    pub len: usize,
    pub start_ms: f64,
    pub end_ms: f64,
    pub outcome: MpsOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameStats {
    pub total: usize,
    pub gated_out: usize,
    pub duty_skipped: usize,
    pub processed: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionSeries {
    pub naive: Vec<NaivePrediction>,
    pub smoothed: Vec<SmoothedPrediction>,
    pub stats: FrameStats,
}

fn check_model(model: &GbdtModel, task: Task, n_features: usize, role: &str) -> Result<()> {
    if model.task != task {
        return Err(Error::ModelMismatch(format!(
            "{role} model is a {} model, expected {}",
            model.task.as_str(),
            task.as_str()
        )));
    }
    if model.n_features != n_features {
        return Err(Error::ModelMismatch(format!(
            "{role} model expects {} features, cutoff gives {n_features}",
            model.n_features
        )));
    }
    if model.sample_rate != PIPELINE_SAMPLE_RATE {
        return Err(Error::ModelMismatch(format!("{role} model was trained at {} Hz", model.sample_rate)));
    }
    Ok(())
}

pub fn process_clip(
    clip: &AudioClip,
    cfg: &PipelineConfig,
    classifier: &GbdtModel,
    regressor: &GbdtModel,
) -> Result<PredictionSeries> {
    clip.ensure_pipeline_rate()?;
    cfg.validate()?;
    let width = feature_len(cfg.cutoff_hz)?;
    check_model(classifier, Task::Classify, width, "classifier")?;
    check_model(regressor, Task::Regress, width, "regressor")?;

    let raw = frame_slices(&clip.samples, FRAME_LEN, clip.sample_rate);
    let mut stats = FrameStats { total: raw.len(), ..FrameStats::default() };
    let mut keep = Vec::with_capacity(raw.len());
    for frame in &raw {
        let kept = if cfg.duty.is_some_and(|d| !d.covers(frame.start_ms)) {
            stats.duty_skipped += 1;
            false
        } else if !is_silent(frame.samples, &cfg.silence)? {
            stats.gated_out += 1;
            false
        } else {
            stats.processed += 1;
            true
        };
        keep.push(kept);
    }

    let mut naive = Vec::with_capacity(stats.processed);
    if stats.processed > 0 {
        let mut masked: Vec<f64> = clip.samples_f64();
        for (frame, &kept) in masked.chunks_exact_mut(FRAME_LEN).zip(&keep) {
            if !kept {
                frame.fill(0.0);
            }
        }
        masked.truncate(raw.len() * FRAME_LEN);
        let kernel = design_lowpass(FilterSpec::lowpass(cfg.cutoff_hz))?;
        let filtered = apply_filter(&kernel, &masked)?;
        for frame in frame_slices(&filtered, FRAME_LEN, clip.sample_rate) {
            if !keep[frame.index] {
                continue;
            }
            let fv = extract_features(frame.samples, frame.start_ms, cfg.cutoff_hz)?;
            naive.push(NaivePrediction {
                frame_index: frame.index,
                start_ms: frame.start_ms,
                vent_prob: classifier.predict(&fv.values)?,
                airflow_mps: regressor.predict(&fv.values)?,
            });
        }
    }

    let smoothed = match &cfg.mps {
        Some(params) => smooth(&naive, params)?,
        None => Vec::new(),
    };
    Ok(PredictionSeries { naive, smoothed, stats })
}

/// Minimum persistent smoothing over disjoint batches of the naive airflow
/// stream; a trailing partial batch is left unsmoothed.
pub fn smooth(naive: &[NaivePrediction], params: &MpsParams) -> Result<Vec<SmoothedPrediction>> {
    let airflow: Vec<f64> = naive.iter().map(|p| p.airflow_mps).collect();
    let frame_ms = FRAME_LEN as f64 * 1000.0 / f64::from(PIPELINE_SAMPLE_RATE);
    Ok(mps_stream(&airflow, params)?
        .into_iter()
        .map(|b| SmoothedPrediction {
            batch: b.batch,
            first: b.first,
            len: params.n,
            start_ms: naive[b.first].start_ms,
            end_ms: naive[b.first + params.n - 1].start_ms + frame_ms,
            outcome: b.outcome,
        })
        .collect())
}

/// Naive and smoothed airflow errors of one series against per-frame truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesErrors {
    pub naive_mse: f64,
    /// Over batches with a value; each batch is compared with the mean truth
    /// of its frames. `None` when no batch produced a value.
    pub smoothed_mse: Option<f64>,
    pub smoothed_batches: usize,
    pub failed_batches: usize,
}

impl PredictionSeries {
    pub fn errors(&self, truth: &[f64]) -> Result<SeriesErrors> {
        let lookup = |i: usize| truth.get(i).copied().ok_or(Error::LengthMismatch { left: i + 1, right: truth.len() });
        let naive_truth = self.naive.iter().map(|p| lookup(p.frame_index)).collect::<Result<Vec<_>>>()?;
        let naive_pred: Vec<f64> = self.naive.iter().map(|p| p.airflow_mps).collect();
        let naive_mse = mse(&naive_pred, &naive_truth)?;

        let (mut pred, mut target) = (Vec::new(), Vec::new());
        let mut failed = 0;
        for batch in &self.smoothed {
            let Some(v) = batch.outcome.value() else {
                failed += 1;
                continue;
            };
            let span = &naive_truth[batch.first..batch.first + batch.len];
            pred.push(v);
            target.push(span.iter().sum::<f64>() / span.len() as f64);
        }
        Ok(SeriesErrors {
            naive_mse,
            smoothed_mse: if pred.is_empty() { None } else { Some(mse(&pred, &target)?) },
            smoothed_batches: pred.len(),
            failed_batches: failed,
        })
    }

    /// `t_ms,vent_prob,airflow_naive`
    pub fn write_naive_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t_ms", "vent_prob", "airflow_naive"]).map_err(csv_err)?;
        for p in &self.naive {
            w.write_record([p.start_ms.to_string(), p.vent_prob.to_string(), p.airflow_mps.to_string()])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `batch,span_ms,airflow_mps`, with `FAIL` for batches without a value
    /// and spans written as `start-end`.
    pub fn write_smoothed_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["batch", "span_ms", "airflow_mps"]).map_err(csv_err)?;
        for b in &self.smoothed {
            let value = match b.outcome {
                MpsOutcome::Value(v) => v.to_string(),
                MpsOutcome::Failure => "FAIL".to_string(),
            };
            w.write_record([b.batch.to_string(), format!("{}-{}", b.start_ms, b.end_ms), value]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::MalformedCsv(e.to_string())
}

/// Errors of a fresh regressor trained at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub cutoff_hz: f64,
    pub train_mse: f64,
    pub test_mse: f64,
}

/// Trains and scores an airflow regressor on precomputed samples.
pub fn train_and_score(train: &[LabeledSample], test: &[LabeledSample], hp: &HyperParams) -> Result<(f64, f64)> {
    let train_set = to_dataset(train, Target::Airflow)?;
    let test_set = to_dataset(test, Target::Airflow)?;
    let model = GbdtModel::fit(Task::Regress, &train_set, hp)?;
    let score = |set: &crate::gbdt::Dataset| -> Result<f64> {
        let pred = set.rows().iter().map(|r| model.predict(r)).collect::<Result<Vec<_>>>()?;
        mse(&pred, set.targets())
    };
    Ok((score(&train_set)?, score(&test_set)?))
}

/// For each cutoff, re-extracts features from every clip, trains a regressor
/// on `train` and scores it on both sets. Rows follow the order of `cutoffs`;
/// cutoffs run in parallel.
pub fn sweep_cutoff(
    train: &[LabeledClip],
    test: &[LabeledClip],
    cutoffs: &[f64],
    hp: &HyperParams,
    opts: &ExtractOptions,
) -> Result<Vec<SweepRow>> {
    for &c in cutoffs {
        feature_len(c)?;
    }
    let gather = |clips: &[LabeledClip], cutoff: f64| -> Result<Vec<LabeledSample>> {
        let parts = clips.par_iter().map(|c| c.samples(cutoff, opts)).collect::<Result<Vec<_>>>()?;
        Ok(parts.concat())
    };
    cutoffs
        .par_iter()
        .map(|&cutoff_hz| {
            let (train_mse, test_mse) = train_and_score(&gather(train, cutoff_hz)?, &gather(test, cutoff_hz)?, hp)?;
            Ok(SweepRow { cutoff_hz, train_mse, test_mse })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(values: &[f64]) -> Vec<NaivePrediction> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| NaivePrediction {
                frame_index: 2 * i,
                start_ms: 32.0 * i as f64,
                vent_prob: 0.9,
                airflow_mps: v,
            })
            .collect()
    }

    #[test]
    fn duty_windows() {
        let d = DutyCycle::new(1.0, 4.0).unwrap();
        assert!(d.covers(0.0) && d.covers(999.0));
        assert!(!d.covers(1000.0) && !d.covers(3984.0));
        assert!(d.covers(4000.0));
        assert!(DutyCycle::new(2.0, 1.0).is_err());
        assert!(DutyCycle::new(0.0, 1.0).is_err());
    }

    #[test]
    fn vent_threshold_is_inclusive() {
        let mut p = naive(&[1.0])[0];
        p.vent_prob = VENT_THRESHOLD;
        assert_eq!(p.vent_on(), 1);
        p.vent_prob = 0.49;
        assert_eq!(p.vent_on(), 0);
    }

    #[test]
    fn smoothed_spans_and_errors() {
        let params = MpsParams::new(3, 2, 0.1).unwrap();
        let series = PredictionSeries {
            naive: naive(&[1.0, 1.05, 3.0, 0.0, 2.0, 4.0, 7.0]),
            smoothed: Vec::new(),
            stats: FrameStats::default(),
        };
        let smoothed = smooth(&series.naive, &params).unwrap();
        assert_eq!(smoothed.len(), 2);
        assert_eq!((smoothed[0].start_ms, smoothed[0].end_ms), (0.0, 80.0));
        assert_eq!(smoothed[0].outcome, MpsOutcome::Value(1.025));
        assert_eq!(smoothed[1].outcome, MpsOutcome::Failure);

        let series = PredictionSeries { smoothed, ..series };
        let truth = vec![1.0; 14];
        let e = series.errors(&truth).unwrap();
        assert_eq!((e.smoothed_batches, e.failed_batches), (1, 1));
        assert!((e.smoothed_mse.unwrap() - 0.025f64.powi(2)).abs() < 1e-15);
        assert!(series.errors(&truth[..5]).is_err());

        let mut out = Vec::new();
        series.write_smoothed_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "batch,span_ms,airflow_mps\n0,0-80,1.025\n1,96-176,FAIL\n");
    }

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::default().validate().is_ok());
        assert!(PipelineConfig { cutoff_hz: 100.0, ..PipelineConfig::default() }.validate().is_err());
    }
}
