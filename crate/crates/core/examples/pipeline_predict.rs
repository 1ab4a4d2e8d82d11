//! Runs the full per-clip pipeline on the bursty scene with models trained on
//! the standard corpus.

use airsense::dsp::DEFAULT_CUTOFF_HZ;
use airsense::features::{to_dataset, ExtractOptions, Target};
use airsense::gbdt::{GbdtModel, HyperParams, Task};
use airsense::pipeline::{process_clip, DutyCycle, PipelineConfig};
use airsense::synth::{synth_scene, Corpus, SceneSpec};

fn main() -> airsense::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let mut train = Vec::new();
    for clip in Corpus::load(format!("{dir}/scenes/standard.toml"))?.synthesize()? {
        train.extend(clip.samples(DEFAULT_CUTOFF_HZ, &ExtractOptions::default())?);
    }
    let hp = HyperParams { n_trees: 100, ..HyperParams::default() };
    let clf = GbdtModel::fit(Task::Classify, &to_dataset(&train, Target::VentOn)?, &hp)?;
    let reg = GbdtModel::fit(Task::Regress, &to_dataset(&train, Target::Airflow)?, &hp)?;

    let (clip, truth) = synth_scene(&SceneSpec::load(format!("{dir}/scenes/bursty.toml"))?)?;
    let airflow: Vec<f64> = truth.frames.iter().map(|f| f.airflow_mps).collect();
    for cfg in [
        PipelineConfig::default(),
        PipelineConfig { duty: Some(DutyCycle::new(2.0, 10.0)?), ..PipelineConfig::default() },
    ] {
        let series = process_clip(&clip, &cfg, &clf, &reg)?;
        let e = series.errors(&airflow)?;
        println!("{cfg}");
        println!("  frames {:?}", series.stats);
        println!("  naive mse {:.4}  smoothed mse {:?}", e.naive_mse, e.smoothed_mse);
    }
    Ok(())
}
