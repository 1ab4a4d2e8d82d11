//! Frequency response of the low-pass kernel at a few cutoffs.

use airsense::dsp::{design_lowpass, FilterSpec};

fn main() -> airsense::Result<()> {
    let probes = [100.0, 250.0, 300.0, 375.0, 400.0, 450.0, 500.0, 600.0, 1000.0, 3000.0];
    print!("{:>8}", "cutoff");
    for f in probes {
        print!("{f:>8}");
    }
    println!();
    for cutoff in [250.0, 375.0, 500.0] {
        let kernel = design_lowpass(FilterSpec::lowpass(cutoff))?;
        print!("{cutoff:>8}");
        for f in probes {
            print!("{:>8.1}", kernel.response_db(f));
        }
        println!();
    }
    Ok(())
}
