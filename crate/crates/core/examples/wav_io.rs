//! Encodes a tone as 16-bit PCM WAV, decodes it back and frames it.

use airsense::audio::{decode_wav, encode_wav, frames, quantize, AudioClip};

fn main() -> airsense::Result<()> {
    let tone: Vec<f64> = (0..4000).map(|i| 1000.0 * (i as f64 * 0.05).sin()).collect();
    let clip = AudioClip::new(16_000, quantize(&tone));
    let bytes = encode_wav(&clip);
    let back = decode_wav(&bytes)?;
    assert_eq!(back, clip);

    let fs = frames(&back, 256)?;
    println!("{} bytes, {} samples, {} full frames", bytes.len(), back.len(), fs.len());
    println!("last frame starts at {} ms; {} samples dropped", fs.last().unwrap().start_ms, back.len() % 256);
    Ok(())
}
