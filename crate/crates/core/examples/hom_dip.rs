// Coincidence dip for one photon crossing an 11-layer barrier and its twin
// travelling through air, with the traversal time it implies.

use barrier_tunneling::config::ExperimentConfig;
use barrier_tunneling::twophoton::{coincidence_scan, find_dip, CoincidenceScan, DipResult, ScanOptions};
use barrier_tunneling::Result;

pub fn run_example() -> Result<(CoincidenceScan, DipResult)> {
    let cfg = ExperimentConfig::default();
    let stack = cfg.quarter_wave_barrier(11, false)?;
    let pulse = cfg.pulse_spec()?;
    let scan = coincidence_scan(
        &stack,
        &pulse,
        &cfg.pump_spec()?,
        &cfg.s_grid(),
        &ScanOptions::for_pulse(&pulse)?,
    )?;
    let dip = find_dip(&scan, stack.total_thickness(), cfg.scan.fringe_threshold)?;
    Ok((scan, dip))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (scan, dip) = run_example()?;
    println!("dip at s0 = {:.4} um, R = {:.4}", dip.s0 * 1e6, dip.r_min);
    println!("lead {:.3} fs, traversal time {:.3} fs", dip.delta_tau * 1e15, dip.tau_t * 1e15);
    println!("fringes below threshold: {}", dip.fringe_count);
    println!("plateau mismatch {:.1e}", scan.plateau_mismatch());
    Ok(())
}
