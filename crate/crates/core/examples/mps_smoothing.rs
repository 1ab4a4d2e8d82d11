//! Smoothing a prediction stream with occasional upward spikes.

use airsense::mps::{minimum_persisting_value, mps_stream, MpsParams};
use airsense::rng::SplitMix64;

fn main() -> airsense::Result<()> {
    let mut rng = SplitMix64::new(4);
    let stream: Vec<f64> = (0..100)
        .map(|_| {
            let spike = if rng.next_f64() < 0.3 { rng.uniform(1.0, 4.0) } else { 0.0 };
            2.0 + 0.1 * rng.gaussian() + spike
        })
        .collect();
    let params = MpsParams::default();
    for b in mps_stream(&stream, &params)? {
        let batch = &stream[b.first..b.first + params.n];
        let mean = batch.iter().sum::<f64>() / batch.len() as f64;
        match b.outcome.value() {
            Some(v) => println!("batch {}: mean {mean:.3}  smoothed {v:.3}", b.batch),
            None => println!("batch {}: mean {mean:.3}  smoothed FAIL", b.batch),
        }
    }
    let spread = [0.0, 1.0, 2.0, 3.0, 4.0];
    let tight = MpsParams::new(5, 3, 0.1)?;
    println!("no agreeing run: {:?}", minimum_persisting_value(&spread, &tight)?);
    Ok(())
}
