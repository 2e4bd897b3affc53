// Transmission and absorption matrices of a lossy barrier, and how far they
// stray from the unitarity of the stacked `[T A]` matrix.

use barrier_tunneling::config::ExperimentConfig;
use barrier_tunneling::transfer::scattering_matrices;
use barrier_tunneling::Result;
use num_complex::Complex64;

pub struct Check {
    pub omega: f64,
    pub t12: Complex64,
    /// Largest `|| [T A] row ||^2 - 1|`.
    pub norm_error: f64,
    /// `|<row 1, row 2>|`.
    pub overlap: f64,
    /// Eigenvalues of `I - T T^dagger`.
    pub absorption: [f64; 2],
}

pub fn run_example() -> Result<Vec<Check>> {
    let cfg = ExperimentConfig::default();
    let stack = cfg.quarter_wave_barrier(11, true)?;
    let carrier = cfg.carrier();
    [0.6, 0.8, 1.0, 1.2, 1.4]
        .into_iter()
        .map(|x| {
            let s = scattering_matrices(&stack, x * carrier)?;
            let [a, b] = s.row_norms();
            Ok(Check {
                omega: s.omega,
                t12: s.t12(),
                norm_error: (a - 1.0).abs().max((b - 1.0).abs()),
                overlap: s.row_overlap().norm(),
                absorption: s.passivity_eigenvalues(),
            })
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for c in run_example()? {
        println!(
            "omega {:.4e}  |T12|^2 {:.6}  norm err {:.1e}  overlap {:.1e}  absorption [{:.4}, {:.4}]",
            c.omega,
            c.t12.norm_sqr(),
            c.norm_error,
            c.overlap,
            c.absorption[0],
            c.absorption[1]
        );
    }
    Ok(())
}
