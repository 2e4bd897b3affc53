use std::path::PathBuf;
use std::process::ExitCode;

use barrier_tunneling::config::{ExperimentConfig, PumpModeConfig};
use barrier_tunneling::experiment::{self, Table};
use barrier_tunneling::{Error, Result};
use clap::{Args, Parser, Subcommand};

/// Multilayer barrier transmission and two-photon coincidence runs.
#[derive(Parser)]
#[command(name = "tunnel", version)]
struct Cli {
    /// Directory for the CSV tables (overrides `output.dir`).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Spectral grid size, a power of two (overrides `grid.points`).
    #[arg(long, global = true)]
    grid_points: Option<usize>,

    #[arg(long, global = true, conflicts_with = "tabulated_pump")]
    narrowband: bool,

    #[arg(long, global = true)]
    tabulated_pump: bool,

    /// Print the default config and exit.
    #[arg(long)]
    seed_config: bool,

    /// Do not list written files.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct ConfigArg {
    /// TOML config; built-in defaults when omitted.
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Barrier transmission over the spectral grid.
    Transmittance(ConfigArg),
    /// Coincidence rate against translation length.
    Coincidence(ConfigArg),
    /// Dip position and fringe count against layer count.
    DelaySweep(ConfigArg),
    /// Outgoing line shape and intensity.
    Profiles(ConfigArg),
    /// Kramers-Kronig consistency of the configured materials.
    KkCheck(ConfigArg),
}

fn load(cli: &Cli, path: Option<&PathBuf>) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            ExperimentConfig::from_toml_str(&text)
                .map_err(|e| match e {
                    Error::Config(m) => Error::Config(format!("{}: {m}", p.display())),
                    other => other,
                })?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(n) = cli.grid_points {
        cfg.grid.points = n;
    }
    if cli.narrowband {
        cfg.pump.mode = PumpModeConfig::Narrowband;
    }
    if cli.tabulated_pump {
        cfg.pump.mode = PumpModeConfig::Tabulated;
    }
    if let Some(dir) = &cli.output_dir {
        cfg.output.dir = dir.display().to_string();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    if cli.seed_config {
        print!("{}", ExperimentConfig::default().to_toml_string()?);
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(Error::Config("no subcommand given (try --help)".into()));
    };
    let (arg, run): (&ConfigArg, fn(&ExperimentConfig) -> Result<Vec<Table>>) = match command {
        Command::Transmittance(a) => (a, |c| Ok(vec![experiment::run_transmittance(c)?])),
        Command::Coincidence(a) => (a, |c| Ok(vec![experiment::run_coincidence(c)?])),
        Command::DelaySweep(a) => (a, experiment::run_delay_sweep),
        Command::Profiles(a) => (a, experiment::run_profiles),
        Command::KkCheck(a) => (a, |c| Ok(vec![experiment::run_kk_check(c)?])),
    };
    let cfg = load(cli, arg.config.as_ref())?;
    let dir = PathBuf::from(&cfg.output.dir);
    for table in run(&cfg)? {
        let path = table.write_to_dir(&dir)?;
        if !cli.quiet {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tunnel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
