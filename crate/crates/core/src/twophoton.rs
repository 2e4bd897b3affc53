//! Two-photon interference behind a barrier.
//!
//! One photon of a down-converted pair crosses the barrier, its twin travels
//! through air, and both meet on a balanced beam splitter. Moving a prism by
//! `s` in the air arm changes the relative delay by `2s/c`. With the barrier in
//! its ground state, only the transmission amplitude `T12` enters the
//! coincidence rate:
//!
//! ```text
//! R(s) ~ \int dW a^2(W) F(W; s)
//! F(W; s) = \int_0^W dw |f(w)|^2 |f(W-w)|^2 w (W-w) T12*(W-w)
//!               [ T12(W-w) - exp(-2iWs/c) exp(4iws/c) T12(w) ]
//! ```
//!
//! The first term does not depend on `s` and is the large-`|s|` plateau; the
//! scan is normalized by it. The barrier replaces a slab of air of the same
//! geometric thickness `l`, so the transmission fed into `F` is taken relative
//! to that air path, `T12(w) exp(-i w l / c)`. A photon that leaves the barrier
//! earlier than light crossing `l` in vacuum then yields a dip at `s0 > 0`, the
//! lead is `2 s0 / c` and the traversal time `l/c - 2 s0/c`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::materials::LayerStack;
use crate::pulses::{normalize, pulse_spectrum, PulseSpec, SampledPulse, SpectralGrid};
use crate::transfer::transmittance_scan;
use crate::SPEED_OF_LIGHT;

/// Centre frequency of the pump used for the reference barrier, rad/s.
pub const DEFAULT_OMEGA0: f64 = 5.37e15;

/// Largest accepted `|Im F| / plateau`.
pub const MAX_IMAGINARY_FRACTION: f64 = 1e-8;

/// Largest accepted deviation of the outer-range mean of `R` from 1.
pub const PLATEAU_TOLERANCE: f64 = 1e-3;

/// Local minima deeper than this fraction of the plateau count as fringes.
pub const DEFAULT_FRINGE_THRESHOLD: f64 = 0.98;

/// Pump line shape.
#[derive(Debug, Clone, PartialEq)]
pub enum PumpMode {
    /// `F(W) ~ F(omega0)`.
    Narrowband,
    /// `a^2(W)` sampled on increasing frequencies, unit trapezoid integral.
    Tabulated { omega: Vec<f64>, weight: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpSpec {
    pub omega0: f64,
    pub mode: PumpMode,
}

impl PumpSpec {
    pub fn narrowband(omega0: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::NonPositiveFrequency(omega0));
        }
        Ok(Self {
            omega0,
            mode: PumpMode::Narrowband,
        })
    }

    /// Tabulated pump; `alpha_sq` is rescaled to unit integral.
    pub fn tabulated(omega0: f64, omega: Vec<f64>, alpha_sq: Vec<f64>) -> Result<Self> {
        Self::narrowband(omega0)?;
        if omega.len() != alpha_sq.len() || omega.len() < 2 {
            return Err(Error::InvalidGrid(
                "tabulated pump needs matching frequency and weight lists".into(),
            ));
        }
        if omega[0] <= 0.0 || omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(
                "pump frequencies must be positive and increasing".into(),
            ));
        }
        if alpha_sq.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidGrid("pump weights must be nonnegative".into()));
        }
        let weights = trapezoid_weights(&omega);
        let total: f64 = weights.iter().zip(&alpha_sq).map(|(w, a)| w * a).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidGrid("pump weights integrate to zero".into()));
        }
        Ok(Self {
            omega0,
            mode: PumpMode::Tabulated {
                omega,
                weight: alpha_sq.into_iter().map(|a| a / total).collect(),
            },
        })
    }

    /// Gaussian `a^2` of 1/e half-width `bandwidth`, sampled on `points`
    /// frequencies spaced by whole multiples of the pulse-grid step so that
    /// every sampled `W - w` falls on the grid.
    pub fn gaussian(
        omega0: f64,
        bandwidth: f64,
        points: usize,
        grid: &SpectralGrid,
    ) -> Result<Self> {
        if !(bandwidth > 0.0) || points < 3 {
            return Err(Error::InvalidGrid(
                "Gaussian pump needs positive bandwidth and at least 3 points".into(),
            ));
        }
        let base = grid.omega_min() + grid.omega_max();
        let step = grid.step();
        let span = 3.0 * bandwidth;
        let stride = ((2.0 * span / (points - 1) as f64) / step).round().max(1.0);
        let centre = ((omega0 - base) / step).round();
        let half = (points / 2) as f64;
        let omega: Vec<f64> = (0..points)
            .map(|i| base + (centre + (i as f64 - half) * stride) * step)
            .collect();
        let alpha_sq = omega
            .iter()
            .map(|w| (-((w - omega0) / bandwidth).powi(2)).exp())
            .collect();
        Self::tabulated(omega0, omega, alpha_sq)
    }
}

fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
            let right = if i + 1 < n { x[i + 1] - x[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Value at `omega` of a quantity sampled on `grid`; zero outside the grid,
/// exact on grid points and linearly interpolated in between.
fn sample_at(grid: &SpectralGrid, values: &[Complex64], omega: f64) -> Complex64 {
    let pos = (omega - grid.omega_min()) / grid.step();
    let last = (grid.count() - 1) as f64;
    if pos < -1e-9 || pos > last + 1e-9 {
        return Complex64::new(0.0, 0.0);
    }
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        return values[nearest as usize];
    }
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    values[lo] * (1.0 - frac) + values[lo + 1] * frac
}

/// `F(W; s)` split into the plateau and the `s`-dependent interference term,
/// precomputed for one pump frequency so a scan only pays for the phase sum.
#[derive(Debug, Clone)]
pub struct CoincidenceKernel {
    omega_pump: f64,
    background: f64,
    /// `(4 w - 2 W) / c` for each quadrature node.
    phase_rate: Vec<f64>,
    /// Quadrature weight times `|f|^2 |f|^2 w (W-w) T12*(W-w) T12(w)`.
    cross: Vec<Complex64>,
}

/// Real part of `F` and the imaginary remainder left by the quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub imag: f64,
    /// The `s`-independent plateau term.
    pub background: f64,
}

impl KernelValue {
    pub fn imag_fraction(&self) -> f64 {
        if self.background > 0.0 {
            self.imag.abs() / self.background
        } else {
            0.0
        }
    }
}

impl CoincidenceKernel {
    pub fn new(omega_pump: f64, pulse: &SampledPulse, t12: &[Complex64]) -> Result<Self> {
        let grid = pulse.grid;
        if t12.len() != grid.count() {
            return Err(Error::InvalidGrid(
                "pulse and transmittance must share a grid".into(),
            ));
        }
        if !(omega_pump > 2.0 * grid.omega_min() && omega_pump < 2.0 * grid.omega_max()) {
            return Err(Error::InvalidGrid(format!(
                "pump frequency {omega_pump:e} outside twice the grid span"
            )));
        }
        let f = &pulse.amplitudes;
        let nodes: Vec<usize> = (0..grid.count())
            .filter(|&k| grid.omega(k) < omega_pump)
            .collect();
        let step = grid.step();
        let mut background = 0.0;
        let mut phase_rate = Vec::with_capacity(nodes.len());
        let mut cross = Vec::with_capacity(nodes.len());
        for (i, &k) in nodes.iter().enumerate() {
            let w = grid.omega(k);
            let partner = omega_pump - w;
            let f_partner = sample_at(&grid, f, partner);
            let t_partner = sample_at(&grid, t12, partner);
            let end = if i == 0 || i + 1 == nodes.len() { 0.5 } else { 1.0 };
            let weight = end * step * f[k].norm_sqr() * f_partner.norm_sqr() * w * partner;
            if weight == 0.0 {
                continue;
            }
            background += weight * t_partner.norm_sqr();
            phase_rate.push((4.0 * w - 2.0 * omega_pump) / SPEED_OF_LIGHT);
            cross.push(weight * t_partner.conj() * t12[k]);
        }
        Ok(Self {
            omega_pump,
            background,
            phase_rate,
            cross,
        })
    }

    pub fn omega_pump(&self) -> f64 {
        self.omega_pump
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn evaluate(&self, s: f64) -> KernelValue {
        let interference: Complex64 = self
            .phase_rate
            .iter()
            .zip(&self.cross)
            .map(|(rate, c)| Complex64::from_polar(1.0, rate * s) * c)
            .sum();
        let total = Complex64::new(self.background, 0.0) - interference;
        KernelValue {
            value: total.re,
            imag: total.im,
            background: self.background,
        }
    }
}

/// `F(W; s)` for one pump frequency and translation length.
pub fn coincidence_kernel(
    omega_pump: f64,
    s: f64,
    pulse: &SampledPulse,
    t12: &[Complex64],
) -> Result<KernelValue> {
    let value = CoincidenceKernel::new(omega_pump, pulse, t12)?.evaluate(s);
    if value.imag_fraction() > MAX_IMAGINARY_FRACTION {
        return Err(Error::ImaginaryResidual(value.imag_fraction()));
    }
    Ok(value)
}

/// Plateau-normalized coincidences over translation lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceScan {
    /// Translation lengths in meters.
    pub s_values: Vec<f64>,
    pub r_values: Vec<f64>,
    /// Plateau value that was divided out (arbitrary units).
    pub normalization: f64,
    /// Largest `|Im F| / plateau` over the scan.
    pub max_imag_fraction: f64,
}

impl CoincidenceScan {
    /// `|mean(R over the outer 10% of samples) - 1|`, half taken from each end.
    pub fn plateau_mismatch(&self) -> f64 {
        let n = self.r_values.len();
        let edge = (n / 20).max(1);
        let outer = self.r_values[..edge]
            .iter()
            .chain(&self.r_values[n - edge..])
            .copied();
        let mean = outer.clone().sum::<f64>() / (2 * edge) as f64;
        (mean - 1.0).abs()
    }

    pub fn min_value(&self) -> f64 {
        self.r_values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Knobs shared by scans.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub grid: SpectralGrid,
    /// Fail with [`Error::PlateauNotReached`] when the outer range is not flat.
    pub require_plateau: bool,
}

impl ScanOptions {
    pub fn for_pulse(pulse: &PulseSpec) -> Result<Self> {
        Ok(Self {
            grid: SpectralGrid::around_carrier(pulse.carrier, 4096)?,
            require_plateau: true,
        })
    }
}

/// `T12(w) exp(-i w l / c)`: barrier transmission relative to the air path it replaces.
pub fn relative_transmittance(stack: &LayerStack, grid: &SpectralGrid) -> Result<Vec<Complex64>> {
    let omegas = grid.points();
    let t12 = transmittance_scan(stack, &omegas)?;
    let l = stack.total_thickness();
    Ok(t12
        .into_iter()
        .zip(&omegas)
        .map(|(t, w)| t * Complex64::from_polar(1.0, -w * l / SPEED_OF_LIGHT))
        .collect())
}

/// Uniform translation grid of `count` points over `[s_min, s_max]` meters.
pub fn translation_grid(s_min: f64, s_max: f64, count: usize) -> Vec<f64> {
    crate::materials::uniform_grid(s_min, s_max, count)
}

/// Default translation grid: 4097 points over +-40 um, `s = 0` included.
pub fn default_translation_grid() -> Vec<f64> {
    translation_grid(-40e-6, 40e-6, 4097)
}

/// Coincidence scan for already sampled pulse and transmission.
pub fn coincidence_profile(
    pulse: &SampledPulse,
    t12: &[Complex64],
    pump: &PumpSpec,
    s_grid: &[f64],
    require_plateau: bool,
) -> Result<CoincidenceScan> {
    if s_grid.len() < 2 {
        return Err(Error::InvalidGrid("translation grid needs at least two points".into()));
    }
    let kernels: Vec<(f64, CoincidenceKernel)> = match &pump.mode {
        PumpMode::Narrowband => vec![(1.0, CoincidenceKernel::new(pump.omega0, pulse, t12)?)],
        PumpMode::Tabulated { omega, weight } => {
            let trap = trapezoid_weights(omega);
            omega
                .iter()
                .zip(weight)
                .zip(trap)
                .filter(|((_, a), _)| **a > 0.0)
                .map(|((&w, a), q)| Ok((a * q, CoincidenceKernel::new(w, pulse, t12)?)))
                .collect::<Result<_>>()?
        }
    };
    let plateau: f64 = kernels.iter().map(|(a, k)| a * k.background()).sum();
    if !(plateau > 0.0 && plateau.is_finite()) {
        return Err(Error::TotalExtinction);
    }

    let values: Vec<(f64, f64)> = s_grid
        .par_iter()
        .map(|&s| {
            kernels.iter().fold((0.0, 0.0), |(re, im), (a, k)| {
                let v = k.evaluate(s);
                (re + a * v.value, im + a * v.imag)
            })
        })
        .collect();

    let max_imag_fraction = values
        .iter()
        .map(|(_, im)| im.abs() / plateau)
        .fold(0.0, f64::max);
    if max_imag_fraction > MAX_IMAGINARY_FRACTION {
        return Err(Error::ImaginaryResidual(max_imag_fraction));
    }
    let scan = CoincidenceScan {
        s_values: s_grid.to_vec(),
        r_values: values.iter().map(|(re, _)| re / plateau).collect(),
        normalization: plateau,
        max_imag_fraction,
    };
    if require_plateau {
        let mismatch = scan.plateau_mismatch();
        if mismatch > PLATEAU_TOLERANCE {
            return Err(Error::PlateauNotReached(mismatch));
        }
    }
    Ok(scan)
}

/// Coincidences `R(s)` for a barrier, a single-photon packet and a pump.
pub fn coincidence_scan(
    stack: &LayerStack,
    pulse: &PulseSpec,
    pump: &PumpSpec,
    s_grid: &[f64],
    options: &ScanOptions,
) -> Result<CoincidenceScan> {
    let sampled = pulse_spectrum(pulse, &options.grid)?;
    let t12 = relative_transmittance(stack, &options.grid)?;
    coincidence_profile(&sampled, &t12, pump, s_grid, options.require_plateau)
}

/// Position of the coincidence dip and what it implies for the traversal time.
#[derive(Debug, Clone, PartialEq)]
pub struct DipResult {
    /// Refined position of the global minimum, meters.
    pub s0: f64,
    /// Refined value of `R` at `s0`.
    pub r_min: f64,
    /// Lead `2 s0 / c`, seconds.
    pub delta_tau: f64,
    /// Traversal time `l/c - delta_tau`, seconds.
    pub tau_t: f64,
    /// All local minima `(s, R)` below the fringe threshold, plus the global one.
    pub minima: Vec<(f64, f64)>,
    pub fringe_count: usize,
}

/// Vertex of the parabola through three points.
fn parabola_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> Option<(f64, f64)> {
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if !(curvature > 0.0) {
        return None;
    }
    // y = y1 + b (x - x1) + curvature (x - x1)^2 with b the derivative at x1
    let b = d01 + curvature * (x1 - x0);
    let dx = -b / (2.0 * curvature);
    Some((x1 + dx, y1 + b * dx + curvature * dx * dx))
}

/// Locates the global dip (refined by parabolic interpolation) and counts fringes.
pub fn find_dip(scan: &CoincidenceScan, stack_thickness: f64, fringe_threshold: f64) -> Result<DipResult> {
    let s = &scan.s_values;
    let r = &scan.r_values;
    let n = r.len();
    if n < 64 || s.len() != n {
        return Err(Error::InvalidGrid(format!(
            "dip search needs at least 64 samples, got {n}"
        )));
    }
    let (imin, &rmin) = r
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty scan");
    let rmax = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if rmax - rmin < 1e-12 || imin == 0 || imin == n - 1 {
        return Err(Error::NoInteriorMinimum);
    }
    let (s0, r_min) = parabola_vertex(
        (s[imin - 1], r[imin - 1]),
        (s[imin], r[imin]),
        (s[imin + 1], r[imin + 1]),
    )
    .filter(|(x, _)| *x >= s[imin - 1] && *x <= s[imin + 1])
    .unwrap_or((s[imin], rmin));

    let mut minima: Vec<(f64, f64)> = (1..n - 1)
        .filter(|&j| j != imin && r[j] < r[j - 1] && r[j] < r[j + 1] && r[j] < fringe_threshold)
        .map(|j| (s[j], r[j]))
        .collect();
    minima.push((s0, r_min));
    minima.sort_by(|a, b| a.0.total_cmp(&b.0));

    let delta_tau = 2.0 * s0 / SPEED_OF_LIGHT;
    Ok(DipResult {
        s0,
        r_min,
        delta_tau,
        tau_t: stack_thickness / SPEED_OF_LIGHT - delta_tau,
        fringe_count: minima.len(),
        minima,
    })
}

/// The photon after the barrier, in frequency and in time.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmittedPulse {
    pub incoming: SampledPulse,
    /// `f(w) T12(w)`, renormalized.
    pub spectrum: SampledPulse,
    /// Conjugate time grid, seconds.
    pub times: Vec<f64>,
    /// Outgoing intensity, unit maximum.
    pub intensity: Vec<f64>,
    /// Incoming intensity on the same grid, unit maximum.
    pub incoming_intensity: Vec<f64>,
}

impl TransmittedPulse {
    /// `|<f_out, f_in>|^2`, one when the barrier leaves the line shape alone.
    pub fn spectral_overlap(&self) -> f64 {
        self.spectrum.overlap(&self.incoming).norm_sqr()
    }

    /// Indices of local maxima of the outgoing intensity above `threshold`.
    pub fn intensity_peaks(&self, threshold: f64) -> Vec<usize> {
        local_maxima(&self.intensity, threshold)
    }
}

pub(crate) fn local_maxima(values: &[f64], threshold: f64) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&j| values[j] > threshold && values[j] > values[j - 1] && values[j] >= values[j + 1])
        .collect()
}

/// Outgoing spectrum `f T12` and intensity for a packet crossing `stack`.
pub fn transmitted_profiles(
    stack: &LayerStack,
    pulse: &PulseSpec,
    grid: &SpectralGrid,
) -> Result<TransmittedPulse> {
    let incoming = pulse_spectrum(pulse, grid)?;
    let t12 = transmittance_scan(stack, &grid.points())?;
    let outgoing = SampledPulse::new(
        *grid,
        incoming
            .amplitudes
            .iter()
            .zip(&t12)
            .map(|(f, t)| f * t)
            .collect(),
    )?;
    if !(outgoing.norm() > f64::MIN_POSITIVE.sqrt() * incoming.norm()) {
        return Err(Error::TotalExtinction);
    }
    let spectrum = normalize(&outgoing)?;
    let out_time = spectrum.to_time_domain();
    let in_time = incoming.to_time_domain();
    Ok(TransmittedPulse {
        times: out_time.times.clone(),
        intensity: out_time.peak_normalized_intensity(),
        incoming_intensity: in_time.peak_normalized_intensity(),
        incoming,
        spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::PulseShape;
    use approx::assert_relative_eq;

    const T0: f64 = 20e-15;

    fn gaussian() -> (PulseSpec, SampledPulse) {
        let spec = PulseSpec::new(PulseShape::Gaussian, T0, DEFAULT_OMEGA0 / 2.0).unwrap();
        let grid = SpectralGrid::around_carrier(spec.carrier, 4096).unwrap();
        (spec, pulse_spectrum(&spec, &grid).unwrap())
    }

    fn unit_t12(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); n]
    }

    #[test]
    fn kernel_vanishes_at_zero_delay_without_barrier() {
        let (_, pulse) = gaussian();
        let t = unit_t12(pulse.amplitudes.len());
        let v = coincidence_kernel(DEFAULT_OMEGA0, 0.0, &pulse, &t).unwrap();
        assert!(v.value.abs() <= 1e-14 * v.background);
    }

    #[test]
    fn kernel_reaches_plateau_far_from_dip() {
        let (_, pulse) = gaussian();
        let t = unit_t12(pulse.amplitudes.len());
        let v = coincidence_kernel(DEFAULT_OMEGA0, 60e-6, &pulse, &t).unwrap();
        // independent plateau: direct sum of |f(w)|^2 |f(W-w)|^2 w (W-w)
        let g = pulse.grid;
        let n = g.count();
        let plateau: f64 = (0..n)
            .map(|k| {
                let w = g.omega(k);
                let end = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                end * g.step() * pulse.amplitudes[k].norm_sqr()
                    * pulse.amplitudes[n - 1 - k].norm_sqr()
                    * w
                    * (DEFAULT_OMEGA0 - w)
            })
            .sum();
        assert_relative_eq!(v.value, plateau, max_relative = 1e-10);
    }

    #[test]
    fn kernel_rejects_mismatched_inputs() {
        let (_, pulse) = gaussian();
        assert!(coincidence_kernel(DEFAULT_OMEGA0, 0.0, &pulse, &unit_t12(10)).is_err());
        let t = unit_t12(pulse.amplitudes.len());
        assert!(coincidence_kernel(1e14, 0.0, &pulse, &t).is_err());
    }

    #[test]
    fn empty_barrier_dip_at_origin() {
        let (spec, _) = gaussian();
        let pump = PumpSpec::narrowband(DEFAULT_OMEGA0).unwrap();
        let opts = ScanOptions::for_pulse(&spec).unwrap();
        let scan = coincidence_scan(&LayerStack::empty(), &spec, &pump, &default_translation_grid(), &opts).unwrap();
        let dip = find_dip(&scan, 0.0, DEFAULT_FRINGE_THRESHOLD).unwrap();
        assert!(dip.s0.abs() < 1e-12);
        assert!(dip.r_min.abs() < 1e-10);
        assert_eq!(dip.fringe_count, 1);
        assert!(scan.plateau_mismatch() < 1e-3);
    }

    #[test]
    fn tabulated_pump_is_normalized() {
        let (_, pulse) = gaussian();
        let pump = PumpSpec::gaussian(DEFAULT_OMEGA0, 2e13, 9, &pulse.grid).unwrap();
        let PumpMode::Tabulated { omega, weight } = &pump.mode else {
            panic!("expected tabulated pump");
        };
        let total: f64 = trapezoid_weights(omega).iter().zip(weight).map(|(a, b)| a * b).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        assert!(PumpSpec::tabulated(DEFAULT_OMEGA0, vec![1.0, 2.0], vec![1.0, -1.0]).is_err());
        assert!(PumpSpec::tabulated(DEFAULT_OMEGA0, vec![2.0, 1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn tabulated_pump_without_barrier_still_dips_at_zero() {
        let (_, pulse) = gaussian();
        let pump = PumpSpec::gaussian(DEFAULT_OMEGA0, 2e13, 9, &pulse.grid).unwrap();
        let t = unit_t12(pulse.amplitudes.len());
        let scan = coincidence_profile(&pulse, &t, &pump, &default_translation_grid(), true).unwrap();
        let dip = find_dip(&scan, 0.0, DEFAULT_FRINGE_THRESHOLD).unwrap();
        assert!(dip.s0.abs() < 20e-9);
        assert!(dip.r_min < 1e-3);
    }

    #[test]
    fn parabola_vertex_is_exact_for_parabolas() {
        let f = |x: f64| 3.0 * (x - 0.3).powi(2) + 0.5;
        let (x, y) = parabola_vertex((0.0, f(0.0)), (0.5, f(0.5)), (1.5, f(1.5))).unwrap();
        assert_relative_eq!(x, 0.3, epsilon = 1e-12);
        assert_relative_eq!(y, 0.5, epsilon = 1e-12);
        assert!(parabola_vertex((0.0, 0.0), (1.0, 1.0), (2.0, 2.0)).is_none());
    }

    #[test]
    fn flat_and_edge_scans_have_no_dip() {
        let s: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let flat = CoincidenceScan {
            s_values: s.clone(),
            r_values: vec![1.0; 100],
            normalization: 1.0,
            max_imag_fraction: 0.0,
        };
        assert!(matches!(find_dip(&flat, 0.0, 0.98), Err(Error::NoInteriorMinimum)));
        let edge = CoincidenceScan {
            r_values: s.iter().map(|x| x / 100.0).collect(),
            s_values: s,
            ..flat.clone()
        };
        assert!(matches!(find_dip(&edge, 0.0, 0.98), Err(Error::NoInteriorMinimum)));
        let short = CoincidenceScan {
            s_values: vec![0.0; 10],
            r_values: vec![1.0; 10],
            ..flat
        };
        assert!(matches!(find_dip(&short, 0.0, 0.98), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn dip_bookkeeping() {
        let s: Vec<f64> = (0..200).map(|i| (i as f64 - 100.0) * 1e-8).collect();
        let r: Vec<f64> = s
            .iter()
            .map(|x| 1.0 - 0.9 * (-((x - 2.5e-8) / 2e-7).powi(2)).exp() - 0.1 * (-((x + 6e-7) / 5e-8).powi(2)).exp())
            .collect();
        let scan = CoincidenceScan {
            s_values: s,
            r_values: r,
            normalization: 1.0,
            max_imag_fraction: 0.0,
        };
        let l = 3e-6;
        let dip = find_dip(&scan, l, 0.98).unwrap();
        assert_eq!(dip.fringe_count, 2);
        assert!(dip.minima.contains(&(dip.s0, dip.r_min)));
        assert!((dip.s0 - 2.5e-8).abs() < 2e-9);
        assert_relative_eq!(dip.delta_tau, 2.0 * dip.s0 / SPEED_OF_LIGHT);
        assert_relative_eq!(dip.tau_t + dip.delta_tau, l / SPEED_OF_LIGHT, max_relative = 1e-15);
    }

    #[test]
    fn empty_barrier_leaves_pulse_untouched() {
        let (spec, pulse) = gaussian();
        let out = transmitted_profiles(&LayerStack::empty(), &spec, &pulse.grid).unwrap();
        for (a, b) in out.spectrum.amplitudes.iter().zip(&out.incoming.amplitudes) {
            assert!((a - b).norm() <= 1e-15 * (1.0 + b.norm()));
        }
        for (a, b) in out.intensity.iter().zip(&out.incoming_intensity) {
            assert!((a - b).abs() <= 1e-14);
        }
        assert_relative_eq!(out.spectral_overlap(), 1.0, epsilon = 1e-12);
        assert_eq!(out.intensity_peaks(0.2).len(), 1);
    }
}
