//! Band energies of a speech-heavy scene before and after low-pass filtering.

use airsense::audio::write_wav;
use airsense::privacy::{privacy_report, DEFAULT_SPLIT_HZ};
use airsense::synth::{synth_scene, SceneSpec};

fn main() -> airsense::Result<()> {
    let spec = SceneSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenes/speech.toml"))?;
    let (clip, _) = synth_scene(&spec)?;
    for split in [DEFAULT_SPLIT_HZ, 450.0, 600.0] {
        let (filtered, report) = privacy_report(&clip, 375.0, split)?;
        println!("{report}\n");
        if split == DEFAULT_SPLIT_HZ {
            write_wav("speech.lp.wav", &filtered)?;
        }
    }
    Ok(())
}
