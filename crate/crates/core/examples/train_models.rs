//! Trains the vent classifier and airflow regressor on the standard corpus
//! and scores them on a held-out fifth.

use airsense::dsp::DEFAULT_CUTOFF_HZ;
use airsense::features::{to_dataset, train_test_split, ExtractOptions, Target};
use airsense::gbdt::{save_model, GbdtModel, HyperParams, Task};
use airsense::metrics::{classification_report, RegressionReport};
use airsense::synth::Corpus;

fn main() -> airsense::Result<()> {
    let corpus = Corpus::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenes/standard.toml"))?;
    let mut samples = Vec::new();
    for clip in corpus.synthesize()? {
        samples.extend(clip.samples(DEFAULT_CUTOFF_HZ, &ExtractOptions::default())?);
    }
    let (train, test) = train_test_split(&samples, 0.2, 1)?;
    let hp = HyperParams { n_trees: 100, ..HyperParams::default() };

    let clf = GbdtModel::fit(Task::Classify, &to_dataset(&train, Target::VentOn)?, &hp)?;
    let pred: Vec<u8> = test.iter().map(|s| clf.predict_label(&s.features.values)).collect::<Result<_, _>>()?;
    let truth: Vec<u8> = test.iter().map(|s| s.vent_on).collect();
    println!("{}", classification_report(&pred, &truth)?);

    let reg = GbdtModel::fit(Task::Regress, &to_dataset(&train, Target::Airflow)?, &hp)?;
    let pred: Vec<f64> = test.iter().map(|s| reg.predict(&s.features.values)).collect::<Result<_, _>>()?;
    let truth: Vec<f64> = test.iter().map(|s| s.airflow_mps).collect();
    println!("{}", RegressionReport::compute(&pred, &truth)?);

    save_model(&clf, "vent_classifier.json")?;
    save_model(&reg, "airflow_regressor.json")?;
    Ok(())
}
