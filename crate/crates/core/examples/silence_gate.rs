//! Which frames of a bursty scene pass the silence gate.

use airsense::audio::frames;
use airsense::dsp::rms;
use airsense::silence::{is_silent, SilenceConfig};
use airsense::synth::{synth_scene, SceneSpec};

fn main() -> airsense::Result<()> {
    let spec = SceneSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenes/bursty.toml"))?;
    let (clip, _) = synth_scene(&spec)?;
    let cfg = SilenceConfig::default();
    let all = frames(&clip, 256)?;
    let kept: Vec<bool> = all.iter().map(|f| is_silent(f.samples, &cfg)).collect::<Result<_, _>>()?;
    let first_gated = kept.iter().position(|&k| !k).unwrap_or(0);
    let start = first_gated.saturating_sub(20);
    let line: String = kept[start..(start + 100).min(kept.len())].iter().map(|&k| if k { '.' } else { '#' }).collect();
    println!("frames {start}.. ('.' kept, '#' gated):\n{line}");
    let kept = kept.iter().filter(|&&k| k).count();
    println!("{kept} of {} frames kept at threshold {}", all.len(), cfg.threshold_rms);
    println!("rms of frame 0: {:.1}", rms(all[0].samples)?);
    Ok(())
}
