//! TOML experiment description for the `tunnel` binary and the `experiment` runs.
//!
//! Every section is optional; missing sections fall back to the reference
//! setup: a TiO2/SiO2 `H(LH)^k` quarter-wave barrier (`n_H = 2.22`,
//! `n_L = 1.41` or `1.41 + 0.0372i`), time-limited 20 fs packets and a
//! narrowband pump at `omega0 = 5.37e15 rad/s`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::materials::{ComplexIndex, Layer, LayerStack, MaterialModel};
use crate::pulses::{PulseShape, PulseSpec, SpectralGrid};
use crate::twophoton::{PumpSpec, DEFAULT_FRINGE_THRESHOLD, DEFAULT_OMEGA0};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub materials: BTreeMap<String, MaterialModel>,
    pub stack: StackConfig,
    pub pulse: PulseConfig,
    pub pump: PumpConfig,
    pub grid: GridConfig,
    pub scan: ScanConfig,
    pub sweep: SweepConfig,
    pub kk: KkConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StackConfig {
    /// Layer count `N = 2k + 1` of the `H(LH)^k` barrier; 0 means no barrier.
    pub layers: usize,
    pub high: String,
    pub low: String,
    /// Low-index material used when `lossy` is set.
    pub low_lossy: String,
    pub lossy: bool,
    /// Quarter-wave design frequency in rad/s; defaults to `omega0 / 2`.
    pub design_omega: Option<f64>,
    /// Explicit layer list, replaces the quarter-wave construction when present.
    pub explicit: Option<Vec<LayerConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub material: String,
    pub thickness_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseConfig {
    pub shape: PulseShape,
    pub t0_fs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PumpModeConfig {
    Narrowband,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpConfig {
    pub omega0: f64,
    pub mode: PumpModeConfig,
    /// 1/e half-width of the tabulated Gaussian pump, rad/s.
    pub bandwidth: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    /// Grid limits in units of the photon carrier `omega0 / 2`.
    pub span: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub s_min_um: f64,
    pub s_max_um: f64,
    pub points: usize,
    pub fringe_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub layers: Vec<usize>,
    pub lossless: bool,
    pub lossy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KkConfig {
    /// Coarsest grid size; each material is also checked at 2x and 4x.
    pub points: usize,
    /// Grid limits in units of the material's resonance (or the photon carrier).
    pub span: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub formats: Vec<String>,
}

pub const TIO2: &str = "TiO2";
pub const SIO2: &str = "SiO2";
pub const SIO2_LOSSY: &str = "SiO2-lossy";
pub const LORENTZ_FIXTURE: &str = "lorentz-fixture";

impl Default for ExperimentConfig {
    fn default() -> Self {
        let carrier = DEFAULT_OMEGA0 / 2.0;
        let mut materials = BTreeMap::new();
        materials.insert(
            TIO2.to_string(),
            MaterialModel::ConstantIndex {
                n: ComplexIndex::lossless(2.22),
            },
        );
        materials.insert(
            SIO2.to_string(),
            MaterialModel::ConstantIndex {
                n: ComplexIndex::lossless(1.41),
            },
        );
        materials.insert(
            SIO2_LOSSY.to_string(),
            MaterialModel::ConstantIndex {
                n: ComplexIndex::new(1.41, 0.0372),
            },
        );
        materials.insert(
            LORENTZ_FIXTURE.to_string(),
            MaterialModel::LorentzOscillator {
                omega_t: carrier,
                omega_p: 0.5 * carrier,
                damping: 0.05 * carrier,
            },
        );
        Self {
            materials,
            stack: StackConfig::default(),
            pulse: PulseConfig::default(),
            pump: PumpConfig::default(),
            grid: GridConfig::default(),
            scan: ScanConfig::default(),
            sweep: SweepConfig::default(),
            kk: KkConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl Default for StackConfig {
    fn default() -> Self {
        Self {
            layers: 11,
            high: TIO2.into(),
            low: SIO2.into(),
            low_lossy: SIO2_LOSSY.into(),
            lossy: true,
            design_omega: None,
            explicit: None,
        }
    }
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            shape: PulseShape::TimeLimited,
            t0_fs: 20.0,
        }
    }
}

impl Default for PumpConfig {
    fn default() -> Self {
        Self {
            omega0: DEFAULT_OMEGA0,
            mode: PumpModeConfig::Narrowband,
            bandwidth: 2e13,
            points: 9,
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            points: 4096,
            span: [0.2, 1.8],
        }
    }
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            s_min_um: -40.0,
            s_max_um: 40.0,
            points: 4097,
            fringe_threshold: DEFAULT_FRINGE_THRESHOLD,
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            layers: (5..=24).map(|k| 2 * k + 1).collect(),
            lossless: true,
            lossy: true,
        }
    }
}

impl Default for KkConfig {
    fn default() -> Self {
        Self {
            points: 4096,
            span: [0.1, 10.0],
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "results".into(),
            formats: vec!["csv".into()],
        }
    }
}

/// Finds the line of the first `key = ...` assignment in `source`.
fn locate(source: &str, key: &str) -> Option<usize> {
    source.lines().position(|line| {
        let line = line.trim_start();
        line.strip_prefix(key)
            .map(|rest| rest.trim_start().starts_with('='))
            .unwrap_or(false)
    })
}

fn issue(source: Option<&str>, path: &str, message: impl std::fmt::Display) -> Error {
    let key = path.rsplit('.').next().unwrap_or(path);
    match source.and_then(|s| locate(s, key)) {
        Some(line) => Error::Config(format!("line {}: {path}: {message}", line + 1)),
        None => Error::Config(format!("{path}: {message}")),
    }
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(source: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(source).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate_with_source(Some(source))?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical serialization, hex encoded. The output
    /// section is left out so moving results elsewhere keeps the hash.
    pub fn hash(&self) -> Result<String> {
        let physics = Self {
            output: OutputConfig::default(),
            ..self.clone()
        };
        let canonical = toml::to_string(&physics).map_err(|e| Error::Config(e.to_string()))?;
        Ok(format!("{:x}", Sha256::digest(canonical.as_bytes())))
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_source(None)
    }

    fn validate_with_source(&self, src: Option<&str>) -> Result<()> {
        for (name, model) in &self.materials {
            model
                .validate()
                .map_err(|e| issue(src, &format!("materials.{name}"), e))?;
        }
        let s = &self.stack;
        for (key, name) in [("stack.high", &s.high), ("stack.low", &s.low), ("stack.low_lossy", &s.low_lossy)] {
            if !self.materials.contains_key(name) {
                return Err(issue(src, key, format!("unknown material '{name}'")));
            }
        }
        if s.layers != 0 && (s.layers < 3 || s.layers % 2 == 0) {
            return Err(issue(src, "stack.layers", format!("must be 0 or odd and >= 3, got {}", s.layers)));
        }
        if let Some(w) = s.design_omega {
            if !(w > 0.0) {
                return Err(issue(src, "stack.design_omega", "must be positive"));
            }
        }
        if let Some(layers) = &s.explicit {
            for layer in layers {
                if !self.materials.contains_key(&layer.material) {
                    return Err(issue(src, "stack.explicit.material", format!("unknown material '{}'", layer.material)));
                }
                if !(layer.thickness_nm >= 0.0) {
                    return Err(issue(src, "stack.explicit.thickness_nm", "must be nonnegative"));
                }
            }
        }
        if !(self.pulse.t0_fs > 0.0) {
            return Err(issue(src, "pulse.t0_fs", "must be positive"));
        }
        if !(self.pump.omega0 > 0.0) {
            return Err(issue(src, "pump.omega0", "must be positive"));
        }
        if self.pump.mode == PumpModeConfig::Tabulated && (!(self.pump.bandwidth > 0.0) || self.pump.points < 3) {
            return Err(issue(src, "pump.bandwidth", "tabulated pump needs positive bandwidth and >= 3 points"));
        }
        self.spectral_grid().map_err(|e| issue(src, "grid.points", e))?;
        let sc = &self.scan;
        if !(sc.s_max_um > sc.s_min_um) || sc.points < 64 {
            return Err(issue(src, "scan.points", "need s_min_um < s_max_um and at least 64 points"));
        }
        if !(sc.fringe_threshold > 0.0 && sc.fringe_threshold <= 1.0) {
            return Err(issue(src, "scan.fringe_threshold", "must lie in (0, 1]"));
        }
        if let Some(bad) = self.sweep.layers.iter().find(|&&n| n < 3 || n % 2 == 0) {
            return Err(issue(src, "sweep.layers", format!("layer counts must be odd and >= 3, got {bad}")));
        }
        if self.kk.points < 16 || !(self.kk.span[0] > 0.0 && self.kk.span[1] > self.kk.span[0]) {
            return Err(issue(src, "kk.points", "need at least 16 points and 0 < span[0] < span[1]"));
        }
        if let Some(f) = self.output.formats.iter().find(|f| f.as_str() != "csv") {
            return Err(issue(src, "output.formats", format!("unsupported format '{f}'")));
        }
        Ok(())
    }

    pub fn material(&self, name: &str) -> Result<MaterialModel> {
        self.materials
            .get(name)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown material '{name}'")))
    }

    pub fn carrier(&self) -> f64 {
        self.pump.omega0 / 2.0
    }

    pub fn design_omega(&self) -> f64 {
        self.stack.design_omega.unwrap_or_else(|| self.carrier())
    }

    pub fn spectral_grid(&self) -> Result<SpectralGrid> {
        let c = self.carrier();
        SpectralGrid::new(self.grid.span[0] * c, self.grid.span[1] * c, self.grid.points)
    }

    pub fn pulse_spec(&self) -> Result<PulseSpec> {
        PulseSpec::new(self.pulse.shape, self.pulse.t0_fs * 1e-15, self.carrier())
    }

    pub fn pump_spec(&self) -> Result<PumpSpec> {
        match self.pump.mode {
            PumpModeConfig::Narrowband => PumpSpec::narrowband(self.pump.omega0),
            PumpModeConfig::Tabulated => PumpSpec::gaussian(
                self.pump.omega0,
                self.pump.bandwidth,
                self.pump.points,
                &self.spectral_grid()?,
            ),
        }
    }

    /// Translation lengths in meters.
    pub fn s_grid(&self) -> Vec<f64> {
        crate::twophoton::translation_grid(
            self.scan.s_min_um * 1e-6,
            self.scan.s_max_um * 1e-6,
            self.scan.points,
        )
    }

    /// The `H(LH)^k` barrier with `n_layers = 2k + 1`, lossless or lossy.
    pub fn quarter_wave_barrier(&self, n_layers: usize, lossy: bool) -> Result<LayerStack> {
        let high = self.material(&self.stack.high)?;
        let low = self.material(if lossy { &self.stack.low_lossy } else { &self.stack.low })?;
        quarter_wave_barrier(n_layers, &high, &low, self.design_omega())
    }

    /// Barrier described by the `stack` section.
    pub fn barrier(&self) -> Result<LayerStack> {
        match &self.stack.explicit {
            Some(layers) => {
                let layers = layers
                    .iter()
                    .map(|l| Ok(Layer::new(self.material(&l.material)?, l.thickness_nm * 1e-9)))
                    .collect::<Result<Vec<_>>>()?;
                LayerStack::in_vacuum(layers)
            }
            None => self.quarter_wave_barrier(self.stack.layers, self.stack.lossy),
        }
    }
}

/// `H(LH)^k` barrier by total layer count; `0` gives the empty stack.
pub fn quarter_wave_barrier(
    n_layers: usize,
    high: &MaterialModel,
    low: &MaterialModel,
    design_omega: f64,
) -> Result<LayerStack> {
    match n_layers {
        0 => Ok(LayerStack::empty()),
        n if n >= 3 && n % 2 == 1 => {
            crate::materials::build_quarter_wave_stack((n - 1) / 2, high, low, design_omega)
        }
        n => Err(Error::InvalidStack(format!(
            "H(LH)^k barriers have an odd layer count >= 3, got {n}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash().unwrap(), back.hash().unwrap());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.output.dir = "elsewhere".into();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.stack.layers = 13;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn empty_document_is_the_default() {
        assert_eq!(ExperimentConfig::from_toml_str("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn partial_document() {
        let cfg = ExperimentConfig::from_toml_str(
            "[stack]\nlayers = 41\nlossy = false\n\n[pulse]\nshape = \"gaussian\"\n",
        )
        .unwrap();
        assert_eq!(cfg.stack.layers, 41);
        assert!(!cfg.stack.lossy);
        assert_eq!(cfg.pulse.shape, PulseShape::Gaussian);
        assert_eq!(cfg.barrier().unwrap().len(), 41);
    }

    #[test]
    fn semantic_errors_carry_line_numbers() {
        let err = ExperimentConfig::from_toml_str("[stack]\n\nlayers = 10\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("stack.layers"), "{msg}");
        assert_eq!(err.exit_code(), 2);

        let err = ExperimentConfig::from_toml_str("[stack]\nhigh = \"unobtainium\"\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));

        let err = ExperimentConfig::from_toml_str("[sweep]\nlayers = [11, 12]\n").unwrap_err();
        assert!(err.to_string().contains("sweep.layers"));
    }

    #[test]
    fn syntax_errors_are_config_errors() {
        let err = ExperimentConfig::from_toml_str("[stack\nlayers = 3").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = ExperimentConfig::from_toml_str("[stack]\nlayerz = 3\n").unwrap_err();
        assert!(err.to_string().contains("layerz"));
    }

    #[test]
    fn explicit_layers() {
        let cfg = ExperimentConfig::from_toml_str(
            "[[stack.explicit]]\nmaterial = \"TiO2\"\nthickness_nm = 79.0\n\n[[stack.explicit]]\nmaterial = \"SiO2\"\nthickness_nm = 124.4\n",
        )
        .unwrap();
        let stack = cfg.barrier().unwrap();
        assert_eq!(stack.len(), 2);
        assert!((stack.total_thickness() - 203.4e-9).abs() < 1e-15);
    }

    #[test]
    fn barrier_by_layer_count() {
        let cfg = ExperimentConfig::default();
        assert!(cfg.quarter_wave_barrier(0, true).unwrap().is_empty());
        assert!(cfg.quarter_wave_barrier(4, true).is_err());
        assert!(cfg.quarter_wave_barrier(1, true).is_err());
        assert!(!cfg.quarter_wave_barrier(21, true).unwrap().is_lossless());
        assert!(cfg.quarter_wave_barrier(21, false).unwrap().is_lossless());
    }
}
