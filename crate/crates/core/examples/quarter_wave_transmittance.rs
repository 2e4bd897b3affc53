// Band-center transmission of TiO2/SiO2 quarter-wave barriers against the
// closed form `4 rho / (1 + rho)^2`, `rho = n_H^(2k+2) / n_L^(2k)`.

use barrier_tunneling::materials::{build_quarter_wave_stack, MaterialModel};
use barrier_tunneling::transfer::scattering_matrices;
use barrier_tunneling::twophoton::DEFAULT_OMEGA0;
use barrier_tunneling::Result;

pub struct Row {
    pub k: usize,
    pub layers: usize,
    pub computed: f64,
    pub closed_form: f64,
}

pub fn run_example() -> Result<Vec<Row>> {
    let (n_high, n_low) = (2.22, 1.41);
    let high = MaterialModel::constant(n_high, 0.0)?;
    let low = MaterialModel::constant(n_low, 0.0)?;
    let design = DEFAULT_OMEGA0 / 2.0;
    [1, 5, 10, 20]
        .into_iter()
        .map(|k| {
            let stack = build_quarter_wave_stack(k, &high, &low, design)?;
            let computed = scattering_matrices(&stack, design)?.t12().norm_sqr();
            let rho = f64::powi(n_high, 2 * k as i32 + 2) / f64::powi(n_low, 2 * k as i32);
            Ok(Row {
                k,
                layers: stack.len(),
                computed,
                closed_form: 4.0 * rho / (1.0 + rho).powi(2),
            })
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> Result<()> {
    println!("{:>3} {:>4} {:>24} {:>24}", "k", "N", "|T12|^2", "closed form");
    for row in run_example()? {
        println!(
            "{:>3} {:>4} {:>24.16e} {:>24.16e}",
            row.k, row.layers, row.computed, row.closed_form
        );
    }
    Ok(())
}
