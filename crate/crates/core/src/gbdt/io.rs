//! JSON model files.
//!
//! Keys are emitted in sorted order and floats in shortest round-trip form, so
//! a save/load cycle reproduces every coefficient bit for bit.

use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GbdtModel, Task, TreeNode};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    task: Task,
    n_features: usize,
    sample_rate: u32,
    cutoff_hz: f64,
    learning_rate: f64,
    init_score: f64,
    trees: Vec<TreeNode>,
}

impl GbdtModel {
    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            task: self.task,
            n_features: self.n_features,
            sample_rate: self.sample_rate,
            cutoff_hz: self.cutoff_hz,
            learning_rate: self.learning_rate,
            init_score: self.init_score,
            trees: self.trees.clone(),
        };
        // going through Value sorts the keys
        let value =
            serde_json::to_value(&file).map_err(|e| Error::MalformedModelFile(format!("cannot encode model: {e}")))?;
        let mut text = serde_json::to_string(&value)
            .map_err(|e| Error::MalformedModelFile(format!("cannot encode model: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedModelFile(e.to_string()))?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_i64)
            .ok_or_else(|| Error::MalformedModelFile("missing format_version".into()))?;
        if version != i64::from(FORMAT_VERSION) {
            return Err(Error::VersionMismatch { expected: FORMAT_VERSION, found: version });
        }
        let file: ModelFile = serde_json::from_value(value).map_err(|e| Error::MalformedModelFile(e.to_string()))?;

        for (i, tree) in file.trees.iter().enumerate() {
            if tree.max_feature().is_some_and(|f| f >= file.n_features) {
                return Err(Error::MalformedModelFile(format!(
                    "tree {i} uses a feature index beyond n_features={}",
                    file.n_features
                )));
            }
            if !tree.all_finite() {
                return Err(Error::MalformedModelFile(format!("tree {i} has non-finite values")));
            }
        }
        Ok(Self {
            task: file.task,
            n_features: file.n_features,
            sample_rate: file.sample_rate,
            cutoff_hz: file.cutoff_hz,
            learning_rate: file.learning_rate,
            init_score: file.init_score,
            trees: file.trees,
        })
    }
}

pub fn save_model(model: &GbdtModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model.to_json()?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GbdtModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => Error::ModelNotFound(path.to_path_buf()),
        ErrorKind::InvalidData => Error::MalformedModelFile("not UTF-8".into()),
        _ => Error::Io(e),
    })?;
    GbdtModel::from_json(&text)
}
