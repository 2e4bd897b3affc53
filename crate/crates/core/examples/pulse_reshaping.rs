// Line shape and intensity of a time-limited packet after a thin and a thick
// lossy barrier. The thick one splits the packet into several bursts.

use barrier_tunneling::config::ExperimentConfig;
use barrier_tunneling::experiment::PEAK_THRESHOLD;
use barrier_tunneling::twophoton::{transmitted_profiles, TransmittedPulse};
use barrier_tunneling::Result;

pub fn run_example() -> Result<Vec<(usize, TransmittedPulse)>> {
    let cfg = ExperimentConfig::default();
    let pulse = cfg.pulse_spec()?;
    let grid = cfg.spectral_grid()?;
    [11, 41]
        .into_iter()
        .map(|n| {
            let stack = cfg.quarter_wave_barrier(n, true)?;
            Ok((n, transmitted_profiles(&stack, &pulse, &grid)?))
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for (n, out) in run_example()? {
        let peaks = out.intensity_peaks(PEAK_THRESHOLD);
        println!(
            "N {n}: overlap with incoming line shape {:.4}, {} intensity peaks",
            out.spectral_overlap(),
            peaks.len()
        );
        for &j in &peaks {
            println!("    t = {:8.2} fs  I = {:.3}", out.times[j] * 1e15, out.intensity[j]);
        }
    }
    Ok(())
}
