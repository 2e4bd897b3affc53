// Lead time against barrier thickness. Without losses the lead grows like
// `l / c`, so the traversal time saturates; with losses it grows more slowly.

use barrier_tunneling::config::ExperimentConfig;
use barrier_tunneling::experiment::{delay_sweep, SweepRow};
use barrier_tunneling::{Error, Result, SPEED_OF_LIGHT};

pub struct Sweep {
    pub lossy: bool,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `delta_tau` against `l`, in units of `1/c`.
    pub slope_over_inverse_c: f64,
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn run_example() -> Result<Vec<Sweep>> {
    let cfg = ExperimentConfig::default();
    let layers: Vec<usize> = (7..=15).map(|k| 2 * k + 1).collect();
    [false, true]
        .into_iter()
        .map(|lossy| {
            let rows = delay_sweep(&cfg, &layers, lossy)?;
            let points = rows
                .iter()
                .map(|r| match &r.dip {
                    Ok(d) => Ok((r.thickness, d.delta_tau)),
                    Err(e) => Err(Error::InvariantViolation(format!("N = {}: {e}", r.layers))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Sweep {
                lossy,
                slope_over_inverse_c: fit_slope(&points) * SPEED_OF_LIGHT,
                rows,
            })
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for sweep in run_example()? {
        println!("{} (slope {:.3}/c)", if sweep.lossy { "lossy" } else { "lossless" }, sweep.slope_over_inverse_c);
        for row in &sweep.rows {
            if let Ok(d) = &row.dip {
                println!(
                    "  N {:>2}  l {:.3} um  lead {:.3} fs  traversal {:.3} fs",
                    row.layers,
                    row.thickness * 1e6,
                    d.delta_tau * 1e15,
                    d.tau_t * 1e15
                );
            }
        }
    }
    Ok(())
}
