//! Config-driven runs and their CSV tables.
//!
//! Each run returns one or more [`Table`]s: a `#`-prefixed metadata block
//! (config hash, units, run summary) followed by a CSV header and rows.
//! Floats are written with 17 significant digits so tables round-trip exactly.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::materials::{kk_residual, uniform_grid, LayerStack};
use crate::pulses::pulse_spectrum;
use crate::transfer::{transmittance_scan, PASSIVITY_TOLERANCE};
use crate::twophoton::{
    coincidence_profile, find_dip, relative_transmittance, transmitted_profiles, CoincidenceScan,
    DipResult,
};

/// Peaks of the outgoing intensity below this fraction of the maximum are ignored.
pub const PEAK_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v:.16e}"),
            Cell::Text(v) => f.write_str(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem used by [`Table::write_to_dir`].
    pub name: String,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, config_hash: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            metadata: vec![("config_sha256".into(), config_hash.to_string())],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Float value of `column` in every row.
    pub fn column(&self, column: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == column)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[idx] {
                    Cell::Int(v) => *v as f64,
                    Cell::Float(v) => *v,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(|c| c.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Writes `<dir>/<name>.csv`, creating `dir` if needed.
    pub fn write_to_dir(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.csv", self.name));
        let file = fs::File::create(&path)?;
        self.write(std::io::BufWriter::new(file))?;
        Ok(path)
    }
}

fn loss_label(lossy: bool) -> &'static str {
    if lossy {
        "lossy"
    } else {
        "lossless"
    }
}

/// `T12` of the configured barrier over the spectral grid.
pub fn run_transmittance(cfg: &ExperimentConfig) -> Result<Table> {
    let hash = cfg.hash()?;
    let stack = cfg.barrier()?;
    let omegas = cfg.spectral_grid()?.points();
    let t12 = transmittance_scan(&stack, &omegas)?;
    let mut table = Table::new(
        "transmittance",
        &hash,
        &["omega", "re_t12", "im_t12", "abs_t12_sq"],
    );
    table
        .meta("units", "omega in rad/s; t12 dimensionless")
        .meta("layers", stack.len())
        .meta("thickness_um", stack.total_thickness() * 1e6);
    for (w, t) in omegas.iter().zip(&t12) {
        let power = t.norm_sqr();
        if power > 1.0 + PASSIVITY_TOLERANCE {
            return Err(Error::PassivityViolation {
                omega: *w,
                eigenvalue: 1.0 - power,
            });
        }
        table.push(vec![(*w).into(), t.re.into(), t.im.into(), power.into()]);
    }
    Ok(table)
}

fn check_coincidences(scan: &CoincidenceScan) -> Result<()> {
    if let Some((s, r)) = scan
        .s_values
        .iter()
        .zip(&scan.r_values)
        .find(|(_, r)| !(**r >= -PASSIVITY_TOLERANCE))
    {
        return Err(Error::InvariantViolation(format!(
            "coincidence rate {r:e} is negative at s = {s:e} m"
        )));
    }
    Ok(())
}

fn scan_barrier(cfg: &ExperimentConfig, stack: &LayerStack, require_plateau: bool) -> Result<CoincidenceScan> {
    let grid = cfg.spectral_grid()?;
    let pulse = pulse_spectrum(&cfg.pulse_spec()?, &grid)?;
    let t12 = relative_transmittance(stack, &grid)?;
    let scan = coincidence_profile(&pulse, &t12, &cfg.pump_spec()?, &cfg.s_grid(), require_plateau)?;
    check_coincidences(&scan)?;
    Ok(scan)
}

/// Coincidences `R(s)` for the configured barrier, with the dip in the metadata.
pub fn run_coincidence(cfg: &ExperimentConfig) -> Result<Table> {
    let hash = cfg.hash()?;
    let stack = cfg.barrier()?;
    let scan = scan_barrier(cfg, &stack, true)?;
    let mut table = Table::new("coincidence", &hash, &["s_um", "r"]);
    table
        .meta("units", "s in um; r normalized to the far-delay plateau")
        .meta("layers", stack.len())
        .meta("plateau_mismatch", format!("{:e}", scan.plateau_mismatch()));
    match find_dip(&scan, stack.total_thickness(), cfg.scan.fringe_threshold) {
        Ok(dip) => {
            table
                .meta("s0_um", dip.s0 * 1e6)
                .meta("delta_tau_fs", dip.delta_tau * 1e15)
                .meta("tau_t_fs", dip.tau_t * 1e15)
                .meta("fringe_count", dip.fringe_count);
        }
        Err(Error::NoInteriorMinimum) => {
            table.meta("dip", "none");
        }
        Err(e) => return Err(e),
    }
    for (s, r) in scan.s_values.iter().zip(&scan.r_values) {
        table.push(vec![(s * 1e6).into(), (*r).into()]);
    }
    Ok(table)
}

/// One barrier of a delay sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub layers: usize,
    pub lossy: bool,
    /// Barrier thickness, meters.
    pub thickness: f64,
    /// Dip analysis, or why it failed.
    pub dip: std::result::Result<DipResult, String>,
    /// Largest `|Im F| / plateau` of the scan, zero when the scan failed.
    pub imag_fraction: f64,
}

impl SweepRow {
    /// More than one dip: a single traversal time no longer describes the scan.
    pub fn is_multi_fringe(&self) -> bool {
        matches!(&self.dip, Ok(d) if d.fringe_count > 1)
    }
}

/// Dip position and fringe count for every layer count in `layers`.
///
/// The plateau check is relaxed here because the thickest barriers push
/// fringes into the outer range of the scan.
pub fn delay_sweep(cfg: &ExperimentConfig, layers: &[usize], lossy: bool) -> Result<Vec<SweepRow>> {
    let stacks = layers
        .iter()
        .map(|&n| cfg.quarter_wave_barrier(n, lossy).map(|s| (n, s)))
        .collect::<Result<Vec<_>>>()?;
    stacks
        .par_iter()
        .map(|(n, stack)| {
            let thickness = stack.total_thickness();
            let mut imag_fraction = 0.0;
            let dip = match scan_barrier(cfg, stack, false) {
                Ok(scan) => {
                    imag_fraction = scan.max_imag_fraction;
                    find_dip(&scan, thickness, cfg.scan.fringe_threshold)
                }
                Err(e) => Err(e),
            };
            let dip = match dip {
                Ok(d) => Ok(d),
                Err(e @ (Error::InvariantViolation(_) | Error::PassivityViolation { .. })) => {
                    return Err(e)
                }
                Err(e) => Err(e.to_string()),
            };
            Ok(SweepRow {
                layers: *n,
                lossy,
                thickness,
                dip,
                imag_fraction,
            })
        })
        .collect()
}

/// Smallest layer count in the sweep whose scan shows more than one dip.
pub fn fringe_onset(rows: &[SweepRow]) -> Option<usize> {
    rows.iter()
        .filter(|r| r.is_multi_fringe())
        .map(|r| r.layers)
        .min()
}

/// Delay sweep tables, one per enabled loss setting.
pub fn run_delay_sweep(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let hash = cfg.hash()?;
    let mut tables = Vec::new();
    for lossy in [false, true] {
        let enabled = if lossy { cfg.sweep.lossy } else { cfg.sweep.lossless };
        if !enabled {
            continue;
        }
        let rows = delay_sweep(cfg, &cfg.sweep.layers, lossy)?;
        let label = loss_label(lossy);
        let mut table = Table::new(
            &format!("delay_sweep_{label}"),
            &hash,
            &["n", "l_um", "delta_tau_fs", "tau_t_fs", "fringe_count"],
        );
        table
            .meta("units", "l in um; delta_tau and tau_t in fs")
            .meta("loss", label);
        let list = |pred: &dyn Fn(&SweepRow) -> bool| {
            let ns: Vec<String> = rows.iter().filter(|r| pred(r)).map(|r| r.layers.to_string()).collect();
            if ns.is_empty() {
                "none".to_string()
            } else {
                ns.join(" ")
            }
        };
        table
            .meta("multi_fringe_rows", list(&|r| r.is_multi_fringe()))
            .meta("failed_rows", list(&|r| r.dip.is_err()));
        match fringe_onset(&rows) {
            Some(n) => table.meta("fringe_onset", n),
            None => table.meta("fringe_onset", "none"),
        };
        for row in &rows {
            let (dt, tt, fc) = match &row.dip {
                Ok(d) => (d.delta_tau * 1e15, d.tau_t * 1e15, d.fringe_count),
                Err(_) => (f64::NAN, f64::NAN, 0),
            };
            table.push(vec![
                row.layers.into(),
                (row.thickness * 1e6).into(),
                dt.into(),
                tt.into(),
                fc.into(),
            ]);
        }
        tables.push(table);
    }
    Ok(tables)
}

/// Outgoing line shape and intensity for the configured barrier.
pub fn run_profiles(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let hash = cfg.hash()?;
    let stack = cfg.barrier()?;
    let out = transmitted_profiles(&stack, &cfg.pulse_spec()?, &cfg.spectral_grid()?)?;
    let overlap = out.spectral_overlap();
    let peaks = out.intensity_peaks(PEAK_THRESHOLD).len();

    let mut spectrum = Table::new("profile_spectrum", &hash, &["omega", "abs_f_in", "abs_f_out"]);
    spectrum
        .meta("units", "omega in rad/s; amplitudes in s^1/2, unit L2 norm")
        .meta("layers", stack.len())
        .meta("spectral_overlap", overlap);
    for (k, (fi, fo)) in out
        .incoming
        .amplitudes
        .iter()
        .zip(&out.spectrum.amplitudes)
        .enumerate()
    {
        spectrum.push(vec![out.spectrum.grid.omega(k).into(), fi.norm().into(), fo.norm().into()]);
    }

    let mut intensity = Table::new("profile_intensity", &hash, &["t_fs", "i_in", "i_out"]);
    intensity
        .meta("units", "t in fs; intensities normalized to unit maximum")
        .meta("layers", stack.len())
        .meta("peak_threshold", PEAK_THRESHOLD)
        .meta("peaks", peaks);
    for ((t, ii), io) in out.times.iter().zip(&out.incoming_intensity).zip(&out.intensity) {
        intensity.push(vec![(t * 1e15).into(), (*ii).into(), (*io).into()]);
    }
    Ok(vec![spectrum, intensity])
}

/// Kramers-Kronig residual of every configured material at 1x, 2x and 4x the grid size.
pub fn run_kk_check(cfg: &ExperimentConfig) -> Result<Table> {
    let hash = cfg.hash()?;
    let mut table = Table::new(
        "kk_check",
        &hash,
        &["material", "points", "residual", "absorption_term_norm"],
    );
    table.meta("units", "residual is a relative L2 mismatch of eps_r - 1");
    for (name, model) in &cfg.materials {
        let scale = model.characteristic_frequency().unwrap_or_else(|| cfg.carrier());
        for factor in [1, 2, 4] {
            let points = cfg.kk.points * factor;
            let grid = uniform_grid(cfg.kk.span[0] * scale, cfg.kk.span[1] * scale, points);
            let report = kk_residual(model, &grid)?;
            table.push(vec![
                name.as_str().into(),
                points.into(),
                report.residual.into(),
                report.absorption_term_norm.into(),
            ]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.grid.points = 1024;
        cfg.scan.points = 1025;
        cfg
    }

    #[test]
    fn float_cells_keep_17_digits() {
        let v = std::f64::consts::PI;
        let text = Cell::Float(v).to_string();
        assert_eq!(text.parse::<f64>().unwrap(), v);
        assert_eq!(text, "3.1415926535897931e0");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new("x", "abc", &["a", "b"]);
        t.meta("units", "none");
        t.push(vec![1usize.into(), 0.5.into()]);
        let text = t.to_csv_string().unwrap();
        assert_eq!(text, "# config_sha256: abc\n# units: none\na,b\n1,5.0000000000000000e-1\n");
        assert_eq!(t.column("b").unwrap(), vec![0.5]);
    }

    #[test]
    fn empty_barrier_transmits_everything() {
        let mut cfg = small();
        cfg.stack.layers = 0;
        let t = run_transmittance(&cfg).unwrap();
        assert!(t.column("abs_t12_sq").unwrap().iter().all(|p| (p - 1.0).abs() < 1e-14));
    }

    #[test]
    fn coincidence_table_is_nonnegative() {
        let t = run_coincidence(&small()).unwrap();
        assert!(t.column("r").unwrap().iter().all(|&r| r >= -1e-10));
        assert_eq!(t.metadata_value("fringe_count"), Some("1"));
    }

    #[test]
    fn sweep_flags_and_onset() {
        let cfg = small();
        let rows = delay_sweep(&cfg, &[11, 45], false).unwrap();
        assert!(!rows[0].is_multi_fringe());
        assert!(rows[1].is_multi_fringe());
        assert_eq!(fringe_onset(&rows), Some(45));
    }
}
