// Causality check of a damped Lorentz oscillator: the real part rebuilt from
// the absorption converges as the grid is refined. A constant complex index
// is not causal and stays far off.

use barrier_tunneling::materials::{kk_residual, uniform_grid, MaterialModel};
use barrier_tunneling::Result;

pub fn run_example() -> Result<Vec<(&'static str, usize, f64)>> {
    let carrier = 2.685e15;
    let lorentz = MaterialModel::lorentz(carrier, 0.5 * carrier, 0.05 * carrier)?;
    let constant = MaterialModel::constant(1.41, 0.0372)?;
    let mut out = Vec::new();
    for (name, model) in [("lorentz", lorentz), ("constant", constant)] {
        for points in [2048, 4096, 8192, 16384] {
            let grid = uniform_grid(0.1 * carrier, 10.0 * carrier, points);
            out.push((name, points, kk_residual(&model, &grid)?.residual));
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for (name, points, residual) in run_example()? {
        println!("{name:>8} {points:>6} {residual:.3e}");
    }
    Ok(())
}
