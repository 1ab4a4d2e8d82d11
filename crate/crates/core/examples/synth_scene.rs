//! Renders a scene file to WAV plus per-frame labels.
//!
//! cargo run --example synth_scene -- [scene.toml] [out.wav]

use airsense::audio::write_wav;
use airsense::features::save_truth;
use airsense::synth::{synth_scene, SceneSpec};

fn main() -> airsense::Result<()> {
    let mut args = std::env::args().skip(1);
    let spec_path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenes/demo.toml").into());
    let out = args.next().unwrap_or_else(|| "demo.wav".into());

    let spec = SceneSpec::load(&spec_path)?;
    let (clip, truth) = synth_scene(&spec)?;
    write_wav(&out, &clip)?;
    save_truth(format!("{out}.labels.csv"), &truth)?;

    println!("{} samples, {:.2} s, {} frames", clip.len(), clip.duration_s(), truth.len());
    for seg in &spec.flow {
        println!("  from {:>6.3} s  {:.2} m/s", seg.start_s, seg.airflow_mps);
    }
    Ok(())
}
