//! Gradient-boosted regression trees for vent-state classification and
//! airflow regression.
//!
//! Plain boosting: no shrinkage beyond the learning rate, no subsampling, no
//! regularization terms. Training is fully deterministic, so the same data and
//! hyperparameters always give a byte-identical model file.
//!
//! ```
//! use airsense::gbdt::{Dataset, GbdtModel, HyperParams, Task};
//!
//! let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
//! let targets: Vec<f64> = (0..40).map(|i| if i < 20 { 1.0 } else { 3.0 }).collect();
//! let data = Dataset::new(rows, targets).unwrap();
//! let hp = HyperParams { n_trees: 60, max_depth: 1, ..HyperParams::default() };
//! let model = GbdtModel::fit(Task::Regress, &data, &hp).unwrap();
//! assert!((model.predict(&[5.0]).unwrap() - 1.0).abs() < 1e-3);
//! ```

mod io;
mod tree;

use serde::{Deserialize, Serialize};

pub use io::{load_model, save_model, FORMAT_VERSION};
pub use tree::TreeNode;

use crate::dsp::BIN_HZ;
use crate::error::{Error, Result};
use tree::{LeafRule, TreeBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classify,
    Regress,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Regress => "regress",
        }
    }
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "classify" => Ok(Task::Classify),
            "regress" => Ok(Task::Regress),
            other => Err(format!("unknown task '{other}' (expected classify or regress)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub learning_rate: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self { n_trees: 500, max_depth: 5, min_samples_split: 5, learning_rate: 0.2 }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::InvalidSpec("n_trees must be >= 1".into()));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidSpec("max_depth must be >= 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::InvalidSpec("min_samples_split must be >= 2".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidSpec(format!("learning_rate {} outside (0, 1]", self.learning_rate)));
        }
        Ok(())
    }
}

/// Row-major training matrix with one target per row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    n_features: usize,
    rows: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    /// Rows must share one length and be finite.
    pub fn new(rows: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if rows.len() != targets.len() {
            return Err(Error::LengthMismatch { left: rows.len(), right: targets.len() });
        }
        let n_features = rows.first().map_or(0, Vec::len);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::FeatureLengthMismatch { expected: n_features, got: row.len() });
            }
            if let Some(col) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature { row: r, col });
            }
        }
        Ok(Self { n_features, rows, targets })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n_features).map(|f| self.rows.iter().map(|r| r[f]).collect()).collect()
    }
}

/// Trained ensemble plus the metadata needed to check it against a pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct GbdtModel {
    pub task: Task,
    pub n_features: usize,
    pub sample_rate: u32,
    pub cutoff_hz: f64,
    pub learning_rate: f64,
    pub init_score: f64,
    pub trees: Vec<TreeNode>,
}

/// Base-rate clamp so an all-0 or all-1 training set still has a finite
/// log-odds start.
const BASE_RATE_CLAMP: f64 = 1e-12;

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn mean_exact(xs: &[f64]) -> f64 {
    if xs.iter().all(|&x| x == xs[0]) {
        return xs[0];
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

impl GbdtModel {
    pub fn fit(task: Task, data: &Dataset, hp: &HyperParams) -> Result<Self> {
        hp.validate()?;
        let n = data.len();
        if n < hp.min_samples_split || n == 0 {
            return Err(Error::TooFewSamples { needed: hp.min_samples_split, got: n });
        }
        if let Some(bad) = data.targets.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite target {bad}")));
        }
        if task == Task::Classify {
            if let Some(&bad) = data.targets.iter().find(|&&t| t != 0.0 && t != 1.0) {
                return Err(Error::NonBinaryLabels(bad));
            }
        }

        let y = &data.targets;
        let init_score = match task {
            Task::Regress => mean_exact(y),
            Task::Classify => {
                let rate = (y.iter().sum::<f64>() / n as f64).clamp(BASE_RATE_CLAMP, 1.0 - BASE_RATE_CLAMP);
                (rate / (1.0 - rate)).ln()
            }
        };

        let columns = data.columns();
        let sorted: Vec<Vec<usize>> = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
                idx
            })
            .collect();

        let mut scores = vec![init_score; n];
        let mut grad = vec![0.0; n];
        let mut hess = vec![1.0; n];
        let mut trees = Vec::with_capacity(hp.n_trees);

        for _ in 0..hp.n_trees {
            match task {
                Task::Regress => {
                    for i in 0..n {
                        grad[i] = y[i] - scores[i];
                    }
                }
                Task::Classify => {
                    for i in 0..n {
                        let p = sigmoid(scores[i]);
                        grad[i] = y[i] - p;
                        hess[i] = p * (1.0 - p);
                    }
                }
            }
            let builder = TreeBuilder {
                columns: &columns,
                grad: &grad,
                hess: &hess,
                max_depth: hp.max_depth,
                min_samples_split: hp.min_samples_split,
                leaf_rule: match task {
                    Task::Regress => LeafRule::Mean,
                    Task::Classify => LeafRule::Newton,
                },
            };
            let tree = if data.n_features == 0 {
                // no columns to split on: a single leaf
                TreeBuilder { max_depth: 0, ..builder }.build(vec![(0..n).collect()])
            } else {
                builder.build(sorted.clone())
            };
            for (score, row) in scores.iter_mut().zip(&data.rows) {
                *score += hp.learning_rate * tree.predict(row);
            }
            trees.push(tree);
        }

        Ok(Self {
            task,
            n_features: data.n_features,
            sample_rate: crate::audio::PIPELINE_SAMPLE_RATE,
            cutoff_hz: data.n_features.saturating_sub(1) as f64 * BIN_HZ,
            learning_rate: hp.learning_rate,
            init_score,
            trees,
        })
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::FeatureLengthMismatch { expected: self.n_features, got: x.len() });
        }
        Ok(())
    }

    /// Additive score using only the first `n_trees` trees.
    pub fn raw_score_prefix(&self, x: &[f64], n_trees: usize) -> Result<f64> {
        self.check_len(x)?;
        let mut score = self.init_score;
        for tree in self.trees.iter().take(n_trees) {
            score += self.learning_rate * tree.predict(x);
        }
        Ok(score)
    }

    pub fn raw_score(&self, x: &[f64]) -> Result<f64> {
        self.raw_score_prefix(x, self.trees.len())
    }

    /// Airflow in m/s for regressors, vent-on probability for classifiers.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let score = self.raw_score(x)?;
        Ok(match self.task {
            Task::Regress => score,
            Task::Classify => sigmoid(score),
        })
    }

    /// Same as [`predict`](Self::predict) for a prefix of the ensemble.
    pub fn predict_prefix(&self, x: &[f64], n_trees: usize) -> Result<f64> {
        let score = self.raw_score_prefix(x, n_trees)?;
        Ok(match self.task {
            Task::Regress => score,
            Task::Classify => sigmoid(score),
        })
    }

    /// Vent state at the 0.5 probability threshold.
    pub fn predict_label(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.predict(x)? >= 0.5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, f: impl Fn(f64) -> f64) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * 0.01, (i % 7) as f64]).collect();
        let targets = rows.iter().map(|r| f(r[0])).collect();
        Dataset::new(rows, targets).unwrap()
    }

    #[test]
    fn constant_target_is_exact() {
        let data = grid(200, |_| 0.1);
        let model = GbdtModel::fit(Task::Regress, &data, &HyperParams { n_trees: 10, ..Default::default() }).unwrap();
        assert_eq!(model.init_score, 0.1);
        for x in [[0.0, 0.0], [-100.0, 3.0], [55.5, 1e9]] {
            assert_eq!(model.predict(&x).unwrap(), 0.1);
        }
        assert!(model.trees.iter().all(|t| t.leaf_count() == 1));
    }

    #[test]
    fn zero_gain_classifier_returns_sigmoid_of_init() {
        // identical features: nothing to split on
        let rows = vec![vec![1.0, 1.0]; 10];
        let targets = vec![1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0];
        let data = Dataset::new(rows, targets).unwrap();
        let model = GbdtModel::fit(Task::Classify, &data, &HyperParams { n_trees: 3, ..Default::default() }).unwrap();
        assert!(model.trees.iter().all(|t| t.leaf_count() == 1));
        let expected_init = (0.7f64 / 0.3).ln();
        assert!((model.init_score - expected_init).abs() < 1e-12);
        let mut score = model.init_score;
        for t in &model.trees {
            score += model.learning_rate * t.predict(&[1.0, 1.0]);
        }
        assert_eq!(model.predict(&[1.0, 1.0]).unwrap(), sigmoid(score));
    }

    #[test]
    fn stumps_fit_a_step() {
        let data = grid(1000, |x| if x > 5.0 { 1.0 } else { 0.0 });
        let hp = HyperParams { n_trees: 50, max_depth: 1, ..Default::default() };
        let model = GbdtModel::fit(Task::Regress, &data, &hp).unwrap();
        let mse: f64 =
            data.rows().iter().zip(data.targets()).map(|(r, t)| (model.predict(r).unwrap() - t).powi(2)).sum::<f64>()
                / 1000.0;
        assert!(mse < 1e-4, "{mse}");
        assert!(model.trees.iter().all(|t| t.depth() <= 1));
    }

    #[test]
    fn input_validation() {
        let hp = HyperParams::default();
        let tiny = Dataset::new(vec![vec![1.0]; 4], vec![1.0; 4]).unwrap();
        assert!(matches!(GbdtModel::fit(Task::Regress, &tiny, &hp), Err(Error::TooFewSamples { needed: 5, got: 4 })));
        let labels = Dataset::new(vec![vec![1.0]; 6], vec![0.0, 1.0, 2.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            GbdtModel::fit(Task::Classify, &labels, &hp),
            Err(Error::NonBinaryLabels(v)) if v == 2.0
        ));
        assert!(matches!(
            Dataset::new(vec![vec![1.0], vec![f64::NAN]], vec![0.0, 1.0]),
            Err(Error::NonFiniteFeature { row: 1, col: 0 })
        ));
        assert!(HyperParams { learning_rate: 0.0, ..hp }.validate().is_err());
        assert!(HyperParams { min_samples_split: 1, ..hp }.validate().is_err());
        assert!(HyperParams { n_trees: 0, ..hp }.validate().is_err());
        assert!(HyperParams { max_depth: 0, ..hp }.validate().is_err());
    }

    #[test]
    fn predict_checks_feature_length() {
        let data = grid(50, |x| x);
        let model = GbdtModel::fit(Task::Regress, &data, &HyperParams { n_trees: 2, ..Default::default() }).unwrap();
        assert!(matches!(model.predict(&[1.0]), Err(Error::FeatureLengthMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn task_parsing() {
        assert_eq!("classify".parse::<Task>().unwrap(), Task::Classify);
        assert!("fly".parse::<Task>().unwrap_err().contains("fly"));
    }
}
