//! Minimum Persistent Sensing.
//!
//! Out of a batch of `n` predictions, the estimate is the mean of the lowest
//! run of `p` sorted neighbours that stay within `epsilon` of the run's mean.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpsParams {
    pub n: usize,
    pub p: usize,
    pub epsilon: f64,
}

impl Default for MpsParams {
    fn default() -> Self {
        Self { n: 25, p: 5, epsilon: 0.5 }
    }
}

impl MpsParams {
    pub fn new(n: usize, p: usize, epsilon: f64) -> Result<Self> {
        let params = Self { n, p, epsilon };
        params.validate()?;
        Ok(params)
    }

    /// `n >= p >= 2`, `epsilon > 0`.
    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::InvalidSpec(format!("MPS p must be >= 2, got {}", self.p)));
        }
        if self.n < self.p {
            return Err(Error::InvalidSpec(format!("MPS n ({}) must be >= p ({})", self.n, self.p)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidSpec(format!("MPS epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MpsOutcome {
    Value(f64),
    Failure,
}

impl MpsOutcome {
    pub fn value(self) -> Option<f64> {
        match self {
            MpsOutcome::Value(v) => Some(v),
            MpsOutcome::Failure => None,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// One batch of exactly `params.n` predictions.
pub fn minimum_persisting_value(batch: &[f64], params: &MpsParams) -> Result<MpsOutcome> {
    params.validate()?;
    if batch.len() != params.n {
        return Err(Error::LengthMismatch { left: batch.len(), right: params.n });
    }
    if let Some(pos) = batch.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinitePrediction(pos));
    }

    let mut sorted = batch.to_vec();
    sorted.sort_by(f64::total_cmp);

    // the persistent run is always a contiguous slice of the sorted batch
    let mut start = 0;
    for i in 1..sorted.len() {
        if (mean(&sorted[start..i]) - sorted[i]).abs() > params.epsilon {
            start = i;
        }
        let run = &sorted[start..=i];
        if run.len() == params.p {
            return Ok(MpsOutcome::Value(mean(run)));
        }
    }
    Ok(MpsOutcome::Failure)
}

/// Outcome for one full batch of the stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchOutcome {
    pub batch: usize,
    /// Index of the first prediction in the batch.
    pub first: usize,
    pub outcome: MpsOutcome,
}

/// Tiles the stream into disjoint batches of `n`; a trailing partial batch is
/// discarded.
pub fn mps_stream(predictions: &[f64], params: &MpsParams) -> Result<Vec<BatchOutcome>> {
    params.validate()?;
    predictions
        .chunks_exact(params.n)
        .enumerate()
        .map(|(batch, chunk)| {
            let first = batch * params.n;
            let outcome = minimum_persisting_value(chunk, params).map_err(|e| match e {
                Error::NonFinitePrediction(pos) => Error::NonFinitePrediction(first + pos),
                other => other,
            })?;
            Ok(BatchOutcome { batch, first, outcome })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_batch() {
        let out = minimum_persisting_value(&[2.0; 25], &MpsParams::default()).unwrap();
        assert_eq!(out, MpsOutcome::Value(2.0));
    }

    #[test]
    fn picks_the_low_cluster() {
        let params = MpsParams::new(7, 3, 0.5).unwrap();
        let out = minimum_persisting_value(&[5.0, 1.2, 4.8, 0.9, 1.1, 6.0, 1.3], &params).unwrap();
        assert_eq!(out, MpsOutcome::Value((0.9 + 1.1 + 1.2) / 3.0));
    }

    #[test]
    fn spread_batch_fails() {
        let params = MpsParams::new(5, 3, 0.1).unwrap();
        let out = minimum_persisting_value(&[0.0, 1.0, 2.0, 3.0, 4.0], &params).unwrap();
        assert_eq!(out, MpsOutcome::Failure);
    }

    #[test]
    fn parameter_validation() {
        assert!(MpsParams::new(25, 1, 0.5).is_err());
        assert!(MpsParams::new(4, 5, 0.5).is_err());
        assert!(MpsParams::new(25, 5, 0.0).is_err());
        assert!(MpsParams::new(2, 2, 0.1).is_ok());
    }

    #[test]
    fn batch_errors() {
        let params = MpsParams::default();
        assert!(matches!(
            minimum_persisting_value(&[1.0; 24], &params),
            Err(Error::LengthMismatch { left: 24, right: 25 })
        ));
        let mut batch = vec![1.0; 25];
        batch[3] = f64::NAN;
        assert!(matches!(minimum_persisting_value(&batch, &params), Err(Error::NonFinitePrediction(3))));
    }

    #[test]
    fn stream_partitions() {
        let params = MpsParams::default();
        assert_eq!(mps_stream(&[1.0; 50], &params).unwrap().len(), 2);
        assert!(mps_stream(&[1.0; 24], &params).unwrap().is_empty());
        assert!(mps_stream(&[], &params).unwrap().is_empty());
        let out = mps_stream(&[1.0; 60], &params).unwrap();
        assert_eq!(out[1].first, 25);
        assert_eq!(out[1].batch, 1);
    }

    #[test]
    fn stream_reports_absolute_position_of_bad_value() {
        let mut xs = vec![1.0; 50];
        xs[30] = f64::INFINITY;
        assert!(matches!(mps_stream(&xs, &MpsParams::default()), Err(Error::NonFinitePrediction(30))));
    }
}
