//! Test MSE of the airflow regressor for every candidate cutoff.

use airsense::dsp::CANDIDATE_CUTOFFS;
use airsense::features::ExtractOptions;
use airsense::gbdt::HyperParams;
use airsense::pipeline::sweep_cutoff;
use airsense::synth::Corpus;

fn main() -> airsense::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let train = Corpus::load(format!("{dir}/scenes/interference_train.toml"))?.synthesize()?;
    let test = Corpus::load(format!("{dir}/scenes/interference_test.toml"))?.synthesize()?;
    let hp = HyperParams { n_trees: 100, ..HyperParams::default() };
    println!("cutoff_hz  train_mse  test_mse");
    for row in sweep_cutoff(&train, &test, &CANDIDATE_CUTOFFS, &hp, &ExtractOptions::default())? {
        println!("{:>9}  {:>9.4}  {:>8.4}", row.cutoff_hz, row.train_mse, row.test_mse);
    }
    Ok(())
}
