// Layer count at which the coincidence scan stops showing a single dip.

use barrier_tunneling::config::ExperimentConfig;
use barrier_tunneling::experiment::{delay_sweep, fringe_onset, SweepRow};
use barrier_tunneling::Result;

pub struct Onset {
    pub lossy: bool,
    pub rows: Vec<SweepRow>,
    pub onset: Option<usize>,
}

pub fn run_example() -> Result<Vec<Onset>> {
    let cfg = ExperimentConfig::default();
    let layers: Vec<usize> = (5..=24).map(|k| 2 * k + 1).collect();
    [false, true]
        .into_iter()
        .map(|lossy| {
            let rows = delay_sweep(&cfg, &layers, lossy)?;
            Ok(Onset {
                lossy,
                onset: fringe_onset(&rows),
                rows,
            })
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for o in run_example()? {
        let counts: Vec<String> = o
            .rows
            .iter()
            .map(|r| format!("{}:{}", r.layers, r.dip.as_ref().map(|d| d.fringe_count).unwrap_or(0)))
            .collect();
        println!("{}: onset {:?}", if o.lossy { "lossy" } else { "lossless" }, o.onset);
        println!("  {}", counts.join(" "));
    }
    Ok(())
}
