//! Dielectric response of the barrier constituents.
//!
//! A material is described only through its complex permittivity
//! `eps(omega) = eps_r + i eps_i` with time dependence `exp(-i omega t)`, so that
//! absorption shows up as `eps_i >= 0` and as a nonnegative imaginary part of the
//! refractive index `n = sqrt(eps) = beta + i gamma`.
//!
//! Besides the evaluation of the permittivity, this module builds the
//! quarter-wave `H(LH)^k` barriers used throughout the crate and offers a
//! Kramers-Kronig consistency check ([`kk_residual`]). The check makes the
//! tension of a frequency-independent lossy index visible: such a material
//! cannot be causal, and its residual stays finite however fine the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// Tolerance on `Im eps` below zero that is still accepted as passive.
pub const GAIN_TOLERANCE: f64 = 1e-12;

/// Complex refractive index `beta + i gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexIndex {
    pub beta: f64,
    pub gamma: f64,
}

impl ComplexIndex {
    pub const VACUUM: ComplexIndex = ComplexIndex { beta: 1.0, gamma: 0.0 };

    pub fn new(beta: f64, gamma: f64) -> Self {
        Self { beta, gamma }
    }

    pub fn lossless(beta: f64) -> Self {
        Self { beta, gamma: 0.0 }
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.beta, self.gamma)
    }

    pub fn is_lossless(self) -> bool {
        self.gamma == 0.0
    }

    /// Checks the passive propagating-medium invariants `beta > 0`, `gamma >= 0`.
    pub fn validate(self) -> Result<Self> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "real index part must be positive, got {}",
                self.beta
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "imaginary index part must be nonnegative, got {}",
                self.gamma
            )));
        }
        Ok(self)
    }
}

impl From<ComplexIndex> for Complex64 {
    fn from(n: ComplexIndex) -> Self {
        n.as_complex()
    }
}

/// Permittivity model of a homogeneous material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MaterialModel {
    /// Frequency-independent refractive index.
    ConstantIndex { n: ComplexIndex },
    /// Single damped Lorentz resonance, `1 + wp^2 / (wT^2 - w^2 - i g w)`.
    LorentzOscillator {
        omega_t: f64,
        omega_p: f64,
        damping: f64,
    },
}

impl MaterialModel {
    pub const VACUUM: MaterialModel = MaterialModel::ConstantIndex {
        n: ComplexIndex::VACUUM,
    };

    pub fn constant(beta: f64, gamma: f64) -> Result<Self> {
        let n = ComplexIndex::new(beta, gamma).validate()?;
        Ok(MaterialModel::ConstantIndex { n })
    }

    pub fn lorentz(omega_t: f64, omega_p: f64, damping: f64) -> Result<Self> {
        let model = MaterialModel::LorentzOscillator {
            omega_t,
            omega_p,
            damping,
        };
        model.validate()
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            MaterialModel::ConstantIndex { n } => {
                n.validate()?;
            }
            MaterialModel::LorentzOscillator {
                omega_t,
                omega_p,
                damping,
            } => {
                for (name, v) in [("omega_t", omega_t), ("omega_p", omega_p), ("damping", damping)] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::InvalidMaterial(format!(
                            "Lorentz parameter {name} must be positive, got {v}"
                        )));
                    }
                }
            }
        }
        Ok(self)
    }

    /// Resonance frequency for dispersive models; `None` for a constant index.
    pub fn characteristic_frequency(&self) -> Option<f64> {
        match self {
            MaterialModel::ConstantIndex { .. } => None,
            MaterialModel::LorentzOscillator { omega_t, .. } => Some(*omega_t),
        }
    }

    /// True when the model has no absorption at any frequency.
    pub fn is_lossless(&self) -> bool {
        match self {
            MaterialModel::ConstantIndex { n } => n.is_lossless(),
            MaterialModel::LorentzOscillator { .. } => false,
        }
    }

    pub fn permittivity(&self, omega: f64) -> Result<Complex64> {
        permittivity_at(self, omega)
    }

    pub fn index(&self, omega: f64) -> Result<ComplexIndex> {
        refractive_index(permittivity_at(self, omega)?)
    }
}

/// Complex permittivity of `model` at angular frequency `omega`.
pub fn permittivity_at(model: &MaterialModel, omega: f64) -> Result<Complex64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    Ok(match *model {
        MaterialModel::ConstantIndex { n } => {
            let n = n.as_complex();
            n * n
        }
        MaterialModel::LorentzOscillator {
            omega_t,
            omega_p,
            damping,
        } => {
            let denom = Complex64::new(omega_t * omega_t - omega * omega, -damping * omega);
            1.0 + omega_p * omega_p / denom
        }
    })
}

/// Refractive index `sqrt(eps)` on the branch with `beta >= 0`, `gamma >= 0`.
pub fn refractive_index(epsilon: Complex64) -> Result<ComplexIndex> {
    if epsilon.im < -GAIN_TOLERANCE {
        return Err(Error::GainMedium(epsilon.im));
    }
    // Fold tiny negative (and negative-zero) imaginary parts onto the upper
    // half plane so the principal root lands in the first quadrant.
    let im = if epsilon.im > 0.0 { epsilon.im } else { 0.0 };
    let eps = Complex64::new(epsilon.re, im);
    let n = eps.sqrt();
    Ok(ComplexIndex {
        beta: n.re.abs(),
        gamma: n.im.abs(),
    })
}

/// One homogeneous layer of a barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub material: MaterialModel,
    /// Geometric thickness in meters.
    pub thickness: f64,
}

impl Layer {
    pub fn new(material: MaterialModel, thickness: f64) -> Self {
        Self {
            material,
            thickness,
        }
    }
}

/// Ordered layers between two semi-infinite lossless ambients.
///
/// Layers are listed left to right, i.e. in the order the incoming photon from
/// the left meets them. An empty list is the degenerate "no barrier" case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    layers: Vec<Layer>,
    ambient_left: MaterialModel,
    ambient_right: MaterialModel,
}

impl LayerStack {
    pub fn new(
        layers: Vec<Layer>,
        ambient_left: MaterialModel,
        ambient_right: MaterialModel,
    ) -> Result<Self> {
        for (side, ambient) in [("left", &ambient_left), ("right", &ambient_right)] {
            ambient.validate()?;
            if !ambient.is_lossless() {
                return Err(Error::InvalidStack(format!("{side} ambient must be lossless")));
            }
        }
        for (i, layer) in layers.iter().enumerate() {
            layer.material.validate()?;
            // Zero thickness is allowed and acts as identity.
            if !(layer.thickness.is_finite() && layer.thickness >= 0.0) {
                return Err(Error::InvalidStack(format!(
                    "layer {i} has invalid thickness {}",
                    layer.thickness
                )));
            }
        }
        Ok(Self {
            layers,
            ambient_left,
            ambient_right,
        })
    }

    /// Layers in vacuum.
    pub fn in_vacuum(layers: Vec<Layer>) -> Result<Self> {
        Self::new(layers, MaterialModel::VACUUM, MaterialModel::VACUUM)
    }

    pub fn empty() -> Self {
        Self {
            layers: Vec::new(),
            ambient_left: MaterialModel::VACUUM,
            ambient_right: MaterialModel::VACUUM,
        }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn ambient_left(&self) -> &MaterialModel {
        &self.ambient_left
    }

    pub fn ambient_right(&self) -> &MaterialModel {
        &self.ambient_right
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Total geometric thickness `l` in meters.
    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    pub fn is_lossless(&self) -> bool {
        self.layers.iter().all(|l| l.material.is_lossless())
    }

    /// Places `other` to the right of `self`, keeping the outer ambients.
    pub fn concat(&self, other: &LayerStack) -> Result<LayerStack> {
        let mut layers = self.layers.clone();
        layers.extend_from_slice(&other.layers);
        LayerStack::new(layers, self.ambient_left, other.ambient_right)
    }

    /// Splits after the first `at` layers. Both halves keep vacuum-like
    /// copies of the original ambients on their outer side.
    pub fn split_at(&self, at: usize) -> (LayerStack, LayerStack) {
        let at = at.min(self.layers.len());
        let (a, b) = self.layers.split_at(at);
        (
            LayerStack {
                layers: a.to_vec(),
                ambient_left: self.ambient_left,
                ambient_right: self.ambient_right,
            },
            LayerStack {
                layers: b.to_vec(),
                ambient_left: self.ambient_left,
                ambient_right: self.ambient_right,
            },
        )
    }

    /// Same layers in reverse order with the ambients swapped.
    pub fn mirrored(&self) -> LayerStack {
        let mut layers = self.layers.clone();
        layers.reverse();
        LayerStack {
            layers,
            ambient_left: self.ambient_right,
            ambient_right: self.ambient_left,
        }
    }
}

/// Thickness of a layer whose optical thickness is a quarter wave at `design_omega`.
///
/// Only the real part of the index enters; absorption does not change the geometry.
pub fn quarter_wave_thickness(material: &MaterialModel, design_omega: f64) -> Result<f64> {
    let n = material.index(design_omega)?;
    if n.beta <= 0.0 {
        return Err(Error::InvalidMaterial(
            "quarter-wave layer needs a propagating medium".into(),
        ));
    }
    Ok(PI * SPEED_OF_LIGHT / (2.0 * design_omega * n.beta))
}

/// `H(LH)^k` quarter-wave barrier in vacuum: `k + 1` high-index and `k`
/// low-index layers, `2k + 1` layers in total.
pub fn build_quarter_wave_stack(
    k: usize,
    high: &MaterialModel,
    low: &MaterialModel,
    design_omega: f64,
) -> Result<LayerStack> {
    if k < 1 {
        return Err(Error::InvalidStack(
            "H(LH)^k needs at least one period (k >= 1)".into(),
        ));
    }
    for m in [high, low] {
        m.validate()?;
        // passivity over the design frequency
        refractive_index(permittivity_at(m, design_omega)?)?;
    }
    let d_high = quarter_wave_thickness(high, design_omega)?;
    let d_low = quarter_wave_thickness(low, design_omega)?;

    let mut layers = Vec::with_capacity(2 * k + 1);
    layers.push(Layer::new(*high, d_high));
    for _ in 0..k {
        layers.push(Layer::new(*low, d_low));
        layers.push(Layer::new(*high, d_high));
    }
    LayerStack::in_vacuum(layers)
}

/// Outcome of a Kramers-Kronig consistency check.
#[derive(Debug, Clone, PartialEq)]
pub struct KkReport {
    /// Relative L2 mismatch between reconstructed and direct `eps_r - 1`.
    pub residual: f64,
    /// L2 norm of the reconstruction, i.e. of the absorption contribution.
    pub absorption_term_norm: f64,
    /// Frequencies at which the comparison was made (interior grid points).
    pub omega: Vec<f64>,
    /// `eps_r - 1` reconstructed from `eps_i`.
    pub reconstructed: Vec<f64>,
    /// `eps_r - 1` evaluated from the model.
    pub direct: Vec<f64>,
}

/// Reconstructs `eps_r - 1` from `eps_i` by principal-value quadrature over
/// `grid` and compares it with the model.
///
/// The quadrature is the trapezoid rule with the singular cell removed and
/// replaced by its leading-order principal value (a centered difference of the
/// regular part). Outside the grid, `eps_i` is extended linearly down to zero
/// frequency and as `omega^-3` above the grid, which are the asymptotics of any
/// causal response, and both tails are integrated in closed form. The two
/// boundary points, whose singular cell is cut in half, are left out of the
/// comparison.
pub fn kk_residual(model: &MaterialModel, grid: &[f64]) -> Result<KkReport> {
    model.validate()?;
    let n = grid.len();
    if n < 16 {
        return Err(Error::InvalidGrid(format!(
            "Kramers-Kronig grid needs at least 16 points, got {n}"
        )));
    }
    let lo = grid[0];
    let hi = grid[n - 1];
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidGrid(
            "Kramers-Kronig grid must be positive and increasing".into(),
        ));
    }
    let step = (hi - lo) / (n - 1) as f64;
    for (i, w) in grid.iter().enumerate() {
        let expected = lo + step * i as f64;
        if (w - expected).abs() > 1e-6 * step {
            return Err(Error::InvalidGrid(
                "Kramers-Kronig grid must be uniform".into(),
            ));
        }
    }
    let (need_lo, need_hi) = match model.characteristic_frequency() {
        Some(wc) => (wc / 10.0, 10.0 * wc),
        None => (lo, 100.0 * lo),
    };
    let slack = 1e-9 * need_hi;
    if lo > need_lo + slack || hi < need_hi - slack {
        return Err(Error::InvalidGrid(format!(
            "grid [{lo:e}, {hi:e}] does not span [{need_lo:e}, {need_hi:e}]"
        )));
    }

    let eps: Vec<Complex64> = grid
        .iter()
        .map(|&w| permittivity_at(model, w))
        .collect::<Result<_>>()?;
    let eps_i: Vec<f64> = eps.iter().map(|e| e.im).collect();

    let low_slope = eps_i[0] / lo;
    let high_coeff = eps_i[n - 1] * hi.powi(3);

    let mut reconstructed = Vec::with_capacity(n - 2);
    for j in 1..n - 1 {
        let w = grid[j];
        let regular = |i: usize| grid[i] * eps_i[i] / (grid[i] + w);
        let mut sum = 0.0;
        for i in 0..n {
            if i == j {
                continue;
            }
            let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            sum += weight * regular(i) / (grid[i] - w);
        }
        sum *= step;
        sum += 0.5 * (regular(j + 1) - regular(j - 1));
        // eps_i ~ omega below the grid
        sum += low_slope * (lo + 0.5 * w * ((lo - w) / (lo + w)).abs().ln());
        // eps_i ~ omega^-3 above the grid
        sum += high_coeff / (w * w) * (((hi + w) / (hi - w)).ln() / (2.0 * w) - 1.0 / hi);
        reconstructed.push(2.0 / PI * sum);
    }
    let direct: Vec<f64> = eps[1..n - 1].iter().map(|e| e.re - 1.0).collect();

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = reconstructed
        .iter()
        .zip(&direct)
        .map(|(a, b)| a - b)
        .collect();
    let mismatch = norm(&diff);
    let reference = norm(&direct);
    let residual = if mismatch == 0.0 {
        0.0
    } else if reference == 0.0 {
        f64::INFINITY
    } else {
        mismatch / reference
    };
    Ok(KkReport {
        residual,
        absorption_term_norm: norm(&reconstructed),
        omega: grid[1..n - 1].to_vec(),
        reconstructed,
        direct,
    })
}

/// Uniform grid of `count` points over `[lo, hi]`, both ends included.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count.max(2) - 1) as f64;
    (0..count).map(|i| lo + step * i as f64).collect()
}

/// Optical phase `beta omega d / c` of a layer; `pi/2` for a quarter wave.
pub fn optical_phase(n: ComplexIndex, omega: f64, thickness: f64) -> f64 {
    n.beta * omega * thickness / SPEED_OF_LIGHT
}
