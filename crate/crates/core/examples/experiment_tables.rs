// Config-driven run: parse a TOML experiment and print the coincidence table.

use barrier_tunneling::config::ExperimentConfig;
use barrier_tunneling::experiment::{run_coincidence, Table};
use barrier_tunneling::Result;

const CONFIG: &str = r#"
[stack]
layers = 21
lossy = false

[pulse]
shape = "gaussian"
t0_fs = 20.0

[scan]
s_min_um = -20.0
s_max_um = 20.0
points = 801
"#;

pub fn run_example() -> Result<Table> {
    run_coincidence(&ExperimentConfig::from_toml_str(CONFIG)?)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let text = run_example()?.to_csv_string()?;
    for line in text.lines().take(20) {
        println!("{line}");
    }
    Ok(())
}
