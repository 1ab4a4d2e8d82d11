//! Classification and regression scores.

use std::fmt;

use crate::error::{Error, Result};

/// Precision and recall for one class, with flags for empty denominators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// No predictions of this class were made.
    pub precision_degenerate: bool,
    /// The class never occurs in the truth.
    pub recall_degenerate: bool,
}

impl ClassScores {
    fn from_counts(true_pos: usize, false_pos: usize, false_neg: usize) -> Self {
        let (precision, precision_degenerate) = ratio(true_pos, true_pos + false_pos);
        let (recall, recall_degenerate) = ratio(true_pos, true_pos + false_neg);
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Self { precision, recall, f1, precision_degenerate, recall_degenerate }
    }
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Confusion-matrix summary with vent-on (1) as the positive class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationReport {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
    pub accuracy: f64,
    pub positive: ClassScores,
    /// Scores with vent-off treated as the positive class.
    pub negative: ClassScores,
}

impl ClassificationReport {
    pub fn precision(&self) -> f64 {
        self.positive.precision
    }

    pub fn recall(&self) -> f64 {
        self.positive.recall
    }

    pub fn f1(&self) -> f64 {
        self.positive.f1
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// Unweighted mean of the two per-class F1 scores.
    pub fn macro_f1(&self) -> f64 {
        0.5 * (self.positive.f1 + self.negative.f1)
    }
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "accuracy  {:.4}", self.accuracy)?;
        writeln!(f, "precision {:.4}{}", self.precision(), flag(self.positive.precision_degenerate))?;
        writeln!(f, "recall    {:.4}{}", self.recall(), flag(self.positive.recall_degenerate))?;
        writeln!(f, "f1        {:.4}", self.f1())?;
        write!(f, "confusion tp={} fp={} fn={} tn={}", self.true_pos, self.false_pos, self.false_neg, self.true_neg)
    }
}

fn flag(degenerate: bool) -> &'static str {
    if degenerate {
        " (degenerate)"
    } else {
        ""
    }
}

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    if left == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

pub fn classification_report(pred: &[u8], truth: &[u8]) -> Result<ClassificationReport> {
    check_lengths(pred.len(), truth.len())?;
    let (mut true_pos, mut false_pos, mut false_neg, mut true_neg) = (0, 0, 0, 0);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (1, 1) => true_pos += 1,
            (1, 0) => false_pos += 1,
            (0, 1) => false_neg += 1,
            (0, 0) => true_neg += 1,
            (p, t) => {
                let bad = if p > 1 { p } else { t };
                return Err(Error::NonBinaryLabels(f64::from(bad)));
            }
        }
    }
    let total = (true_pos + false_pos + false_neg + true_neg) as f64;
    Ok(ClassificationReport {
        true_pos,
        false_pos,
        false_neg,
        true_neg,
        accuracy: (true_pos + true_neg) as f64 / total,
        positive: ClassScores::from_counts(true_pos, false_pos, false_neg),
        negative: ClassScores::from_counts(true_neg, false_neg, false_pos),
    })
}

pub fn mse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_lengths(pred.len(), truth.len())?;
    let sum: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(sum / pred.len() as f64)
}

/// Coefficient of determination `1 - SS_res / SS_tot`. Not symmetric.
pub fn r2(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: truth.len() });
    }
    if truth.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: truth.len() });
    }
    let mean = truth.iter().sum::<f64>() / truth.len() as f64;
    let ss_tot: f64 = truth.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let ss_res: f64 = pred.iter().zip(truth).map(|(p, t)| (t - p) * (t - p)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionReport {
    pub mse: f64,
    pub r2: f64,
}

impl RegressionReport {
    pub fn compute(pred: &[f64], truth: &[f64]) -> Result<Self> {
        Ok(Self { mse: mse(pred, truth)?, r2: r2(pred, truth)? })
    }
}

impl fmt::Display for RegressionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mse {:.6}\nr2  {:.6}", self.mse, self.r2)
    }
}
