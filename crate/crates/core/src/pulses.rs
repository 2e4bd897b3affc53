//! Single-photon wave packets in time and frequency.
//!
//! Transform convention: `f(t) = (2 pi)^-1/2 \int dw exp(-i w t) f(w)`, matching the
//! `exp(-i omega t)` time dependence used everywhere else. A packet with carrier
//! `w_c` therefore reads `f(t) = envelope(t) exp(-i w_c t)` and its spectrum is the
//! (real, even) transform of the envelope shifted to `w_c`.
//!
//! Spectra live on a uniform [`SpectralGrid`] of positive frequencies. The
//! conjugate time grid has spacing `2 pi / (count * d_omega)`, which turns the
//! continuous transform pair into an exactly unitary FFT pair.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest boundary power, relative to the peak, accepted by [`pulse_spectrum`].
pub const MAX_BOUNDARY_LEAKAGE: f64 = 1e-6;

/// Trapezoid intervals per half support used for the envelope transform.
const ENVELOPE_QUADRATURE_POINTS: usize = 2048;

/// Gaussian envelopes are integrated out to this many `t0`.
const GAUSSIAN_SUPPORT: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseShape {
    /// `exp(-(t/t0)^2)`
    Gaussian,
    /// `exp(-1 / (1 - (t / 2t0)^2))` for `|t| < 2 t0`, zero elsewhere.
    TimeLimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// Duration parameter in seconds.
    pub t0: f64,
    /// Carrier angular frequency in rad/s.
    pub carrier: f64,
}

impl PulseSpec {
    pub fn new(shape: PulseShape, t0: f64, carrier: f64) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::InvalidGrid(format!("pulse t0 must be positive, got {t0}")));
        }
        if !(carrier.is_finite() && carrier > 0.0) {
            return Err(Error::NonPositiveFrequency(carrier));
        }
        Ok(Self { shape, t0, carrier })
    }

    /// Real envelope with unit peak.
    pub fn envelope(&self, t: f64) -> f64 {
        match self.shape {
            PulseShape::Gaussian => {
                let x = t / self.t0;
                (-x * x).exp()
            }
            PulseShape::TimeLimited => {
                let x = t / (2.0 * self.t0);
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - x * x)).exp()
                }
            }
        }
    }

    /// Time beyond which the envelope is zero (or below double precision).
    fn support(&self) -> f64 {
        match self.shape {
            PulseShape::Gaussian => GAUSSIAN_SUPPORT * self.t0,
            PulseShape::TimeLimited => 2.0 * self.t0,
        }
    }
}

/// Complex amplitude of the packet at time `t`, unnormalized.
pub fn pulse_time(spec: &PulseSpec, t: f64) -> Complex64 {
    let env = spec.envelope(t);
    if env == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(env, -spec.carrier * t)
}

/// Uniform grid of positive angular frequencies, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    omega_min: f64,
    omega_max: f64,
    count: usize,
}

impl SpectralGrid {
    pub fn new(omega_min: f64, omega_max: f64, count: usize) -> Result<Self> {
        if !(omega_min > 0.0 && omega_max > omega_min && omega_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < omega_min < omega_max, got [{omega_min:e}, {omega_max:e}]"
            )));
        }
        if count < 256 || !count.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "grid size must be a power of two >= 256, got {count}"
            )));
        }
        Ok(Self {
            omega_min,
            omega_max,
            count,
        })
    }

    /// `count` points over `[0.2, 1.8] * carrier`.
    pub fn around_carrier(carrier: f64, count: usize) -> Result<Self> {
        Self::new(0.2 * carrier, 1.8 * carrier, count)
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        (self.omega_max - self.omega_min) / (self.count - 1) as f64
    }

    pub fn omega(&self, k: usize) -> f64 {
        self.omega_min + self.step() * k as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.omega(k)).collect()
    }

    /// Spacing of the conjugate time grid.
    pub fn time_step(&self) -> f64 {
        2.0 * PI / (self.count as f64 * self.step())
    }

    /// Conjugate time grid, centered on `t = 0`.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.time_step();
        let half = (self.count / 2) as f64;
        (0..self.count).map(|m| (m as f64 - half) * dt).collect()
    }
}

/// Spectral amplitudes `f(omega)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPulse {
    pub grid: SpectralGrid,
    pub amplitudes: Vec<Complex64>,
    pub normalized: bool,
}

impl SampledPulse {
    pub fn new(grid: SpectralGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.count() {
            return Err(Error::InvalidGrid(format!(
                "{} amplitudes for a {}-point grid",
                amplitudes.len(),
                grid.count()
            )));
        }
        Ok(Self {
            grid,
            amplitudes,
            normalized: false,
        })
    }

    /// Discrete L2 norm, `sqrt(sum |f|^2 d_omega)`.
    pub fn norm(&self) -> f64 {
        (self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.step()).sqrt()
    }

    /// Inner product `<self, other> = sum conj(self) other d_omega`.
    pub fn overlap(&self, other: &SampledPulse) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.step()
    }

    /// Samples of `f(t)` on the conjugate time grid.
    pub fn to_time_domain(&self) -> TimeSamples {
        let grid = self.grid;
        let n = grid.count();
        let mut buf: Vec<Complex64> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, &a)| if k % 2 == 0 { a } else { -a })
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);

        let times = grid.times();
        let scale = grid.step() / (2.0 * PI).sqrt();
        let amplitudes = buf
            .into_iter()
            .zip(&times)
            .map(|(z, &t)| z * Complex64::from_polar(scale, -grid.omega_min() * t))
            .collect();
        TimeSamples {
            time_step: grid.time_step(),
            times,
            amplitudes,
        }
    }

    /// Inverse of [`SampledPulse::to_time_domain`].
    pub fn from_time_domain(grid: SpectralGrid, samples: &TimeSamples) -> Result<Self> {
        let n = grid.count();
        if samples.amplitudes.len() != n {
            return Err(Error::InvalidGrid("time samples do not match grid".into()));
        }
        let times = grid.times();
        let mut buf: Vec<Complex64> = samples
            .amplitudes
            .iter()
            .zip(&times)
            .map(|(&z, &t)| z * Complex64::from_polar(1.0, grid.omega_min() * t))
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        let scale = grid.time_step() / (2.0 * PI).sqrt();
        let amplitudes = buf
            .into_iter()
            .enumerate()
            .map(|(k, z)| if k % 2 == 0 { z * scale } else { -z * scale })
            .collect();
        SampledPulse::new(grid, amplitudes)
    }
}

/// Samples of a packet on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSamples {
    pub time_step: f64,
    pub times: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
}

impl TimeSamples {
    /// Discrete L2 norm, `sqrt(sum |f|^2 dt)`.
    pub fn norm(&self) -> f64 {
        (self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.time_step).sqrt()
    }

    /// `|f(t)|^2` scaled to unit maximum.
    pub fn peak_normalized_intensity(&self) -> Vec<f64> {
        let intensity: Vec<f64> = self.amplitudes.iter().map(|z| z.norm_sqr()).collect();
        let peak = intensity.iter().cloned().fold(0.0, f64::max);
        if peak > 0.0 {
            intensity.into_iter().map(|x| x / peak).collect()
        } else {
            intensity
        }
    }
}

/// Scales `pulse` to unit discrete L2 norm.
pub fn normalize(pulse: &SampledPulse) -> Result<SampledPulse> {
    let norm = pulse.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::ZeroPulse);
    }
    Ok(SampledPulse {
        grid: pulse.grid,
        amplitudes: pulse.amplitudes.iter().map(|z| z / norm).collect(),
        normalized: true,
    })
}

/// Normalized spectrum of the packet described by `spec`.
///
/// The envelope transform is computed by trapezoid quadrature in time. Both
/// envelopes are smooth and (numerically) compactly supported, so the rule
/// converges faster than any power of the step.
pub fn pulse_spectrum(spec: &PulseSpec, grid: &SpectralGrid) -> Result<SampledPulse> {
    if !(grid.omega_min() < spec.carrier && spec.carrier < grid.omega_max()) {
        return Err(Error::InvalidGrid("grid does not contain the carrier".into()));
    }
    let support = spec.support();
    let h = support / ENVELOPE_QUADRATURE_POINTS as f64;
    let env: Vec<f64> = (0..=ENVELOPE_QUADRATURE_POINTS)
        .map(|j| spec.envelope(j as f64 * h))
        .collect();
    let prefactor = h / (2.0 * PI).sqrt();

    let amplitudes: Vec<Complex64> = grid
        .points()
        .par_iter()
        .map(|&w| {
            let detuning = w - spec.carrier;
            // even envelope: integrate over t >= 0 and double
            let tail: f64 = env
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, e)| e * (detuning * j as f64 * h).cos())
                .sum();
            Complex64::new(prefactor * (env[0] + 2.0 * tail), 0.0)
        })
        .collect();

    let peak = amplitudes.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let edge = amplitudes[0].norm_sqr().max(amplitudes[amplitudes.len() - 1].norm_sqr());
    let leakage = edge / peak;
    if leakage > MAX_BOUNDARY_LEAKAGE {
        return Err(Error::SpectralLeakage(leakage));
    }
    normalize(&SampledPulse::new(*grid, amplitudes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const T0: f64 = 20e-15;
    const CARRIER: f64 = 5.37e15 / 2.0;

    fn spec(shape: PulseShape) -> PulseSpec {
        PulseSpec::new(shape, T0, CARRIER).unwrap()
    }

    fn grid() -> SpectralGrid {
        SpectralGrid::around_carrier(CARRIER, 4096).unwrap()
    }

    #[test]
    fn envelope_values() {
        assert_eq!(pulse_time(&spec(PulseShape::Gaussian), 0.0), Complex64::new(1.0, 0.0));
        let tl = spec(PulseShape::TimeLimited);
        assert_eq!(pulse_time(&tl, 2.0 * T0).norm(), 0.0);
        assert_eq!(pulse_time(&tl, -3.0 * T0).norm(), 0.0);
        assert_relative_eq!(pulse_time(&tl, 0.0).re, 0.36787944117144233, epsilon = 1e-15);
    }

    #[test]
    fn grid_validation() {
        assert!(SpectralGrid::new(1.0, 2.0, 300).is_err());
        assert!(SpectralGrid::new(1.0, 2.0, 128).is_err());
        assert!(SpectralGrid::new(0.0, 2.0, 256).is_err());
        assert!(SpectralGrid::new(2.0, 1.0, 256).is_err());
        let g = grid();
        assert_relative_eq!(g.omega(g.count() - 1), g.omega_max(), max_relative = 1e-15);
        // the default grid is symmetric about the carrier
        assert_relative_eq!(g.omega(0) + g.omega(4095), 2.0 * CARRIER, max_relative = 1e-15);
    }

    #[test]
    fn gaussian_matches_closed_form() {
        let g = grid();
        let numeric = pulse_spectrum(&spec(PulseShape::Gaussian), &g).unwrap();
        let analytic: Vec<Complex64> = g
            .points()
            .iter()
            .map(|w| {
                let nu = w - CARRIER;
                Complex64::new((-(nu * T0).powi(2) / 4.0).exp(), 0.0)
            })
            .collect();
        let analytic = normalize(&SampledPulse::new(g, analytic).unwrap()).unwrap();
        let peak = analytic.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in numeric.amplitudes.iter().zip(&analytic.amplitudes) {
            assert!((a - b).norm() <= 1e-8 * peak);
        }
        // 1/e half-width of |f| is 2 / t0
        let k = numeric
            .amplitudes
            .iter()
            .position(|z| (z.norm() / (peak)) >= (-1.0f64).exp())
            .unwrap();
        assert_relative_eq!(CARRIER - g.omega(k), 2.0 / T0, max_relative = 0.01);
    }

    #[test]
    fn time_limited_spectrum_is_symmetric() {
        let p = pulse_spectrum(&spec(PulseShape::TimeLimited), &grid()).unwrap();
        let n = p.amplitudes.len();
        let peak = p.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..n {
            assert!((p.amplitudes[k].norm() - p.amplitudes[n - 1 - k].norm()).abs() <= 1e-10 * peak);
        }
    }

    #[test]
    fn time_limited_wings_are_heavier() {
        let g = grid();
        let gauss = pulse_spectrum(&spec(PulseShape::Gaussian), &g).unwrap();
        let tl = pulse_spectrum(&spec(PulseShape::TimeLimited), &g).unwrap();
        let centre = g.count() / 2;
        let far = ((CARRIER + 10.0 * 2.0 / T0 - g.omega_min()) / g.step()).round() as usize;
        let rel = |p: &SampledPulse| p.amplitudes[far].norm() / p.amplitudes[centre].norm();
        assert!(rel(&tl) > 1e3 * rel(&gauss).max(1e-300));
    }

    #[test]
    fn narrow_grid_leaks() {
        let g = SpectralGrid::new(CARRIER - 3.0 / T0, CARRIER + 3.0 / T0, 512).unwrap();
        assert!(matches!(
            pulse_spectrum(&spec(PulseShape::TimeLimited), &g),
            Err(Error::SpectralLeakage(_))
        ));
    }

    #[test]
    fn normalization() {
        let p = pulse_spectrum(&spec(PulseShape::TimeLimited), &grid()).unwrap();
        assert!(p.normalized);
        assert_relative_eq!(p.norm(), 1.0, epsilon = 1e-12);

        let again = normalize(&p).unwrap();
        for (a, b) in p.amplitudes.iter().zip(&again.amplitudes) {
            assert!((a - b).norm() <= 1e-15 * a.norm().max(1e-300) + 1e-300);
        }

        let scaled = SampledPulse::new(p.grid, p.amplitudes.iter().map(|z| z * 7.0).collect()).unwrap();
        let rescaled = normalize(&scaled).unwrap();
        for (a, b) in p.amplitudes.iter().zip(&rescaled.amplitudes) {
            assert!((a - b).norm() <= 1e-14 * a.norm() + 1e-300);
        }

        let zero = SampledPulse::new(p.grid, vec![Complex64::new(0.0, 0.0); p.grid.count()]).unwrap();
        assert!(matches!(normalize(&zero), Err(Error::ZeroPulse)));
    }

    #[test]
    fn parseval_and_round_trip() {
        for shape in [PulseShape::Gaussian, PulseShape::TimeLimited] {
            let p = pulse_spectrum(&spec(shape), &grid()).unwrap();
            let time = p.to_time_domain();
            assert_relative_eq!(time.norm(), p.norm(), epsilon = 1e-10);
            let back = SampledPulse::from_time_domain(p.grid, &time).unwrap();
            for (a, b) in p.amplitudes.iter().zip(&back.amplitudes) {
                assert!((a - b).norm() < 1e-10 * p.amplitudes[2048].norm());
            }
        }
    }

    #[test]
    fn time_samples_reproduce_the_packet() {
        let s = spec(PulseShape::Gaussian);
        let p = pulse_spectrum(&s, &grid()).unwrap();
        let time = p.to_time_domain();
        let centre = time.times.iter().position(|&t| t == 0.0).unwrap();
        let scale = time.amplitudes[centre];
        for (t, z) in time.times.iter().zip(&time.amplitudes) {
            if t.abs() < 3.0 * T0 {
                let expected = pulse_time(&s, *t) * scale;
                assert!((z - expected).norm() < 1e-8 * scale.norm());
            }
        }
    }

    #[test]
    fn carrier_shift_moves_spectrum() {
        let g = grid();
        let shift = 40.0 * g.step();
        let base = pulse_spectrum(&spec(PulseShape::Gaussian), &g).unwrap();
        let moved = pulse_spectrum(
            &PulseSpec::new(PulseShape::Gaussian, T0, CARRIER + shift).unwrap(),
            &g,
        )
        .unwrap();
        let argmax = |p: &SampledPulse| {
            p.amplitudes
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap()
                .0 as i64
        };
        assert!((argmax(&moved) - argmax(&base) - 40).abs() <= 1);
    }
}
