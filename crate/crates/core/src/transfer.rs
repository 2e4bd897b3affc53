//! Frequency-resolved scattering of a single transverse mode at a layer stack.
//!
//! The stack is composed from standard thin-film characteristic matrices at
//! normal incidence. From the composed matrix the amplitude reflection and
//! transmission coefficients follow, and from those the input-output matrix
//! `T` relating outgoing to incoming amplitudes:
//!
//! ```text
//! (out_left )   (T11 T12) (in_left )   (A11 A12) (noise_+)
//! (out_right) = (T21 T22) (in_right) + (A21 A22) (noise_-)
//! ```
//!
//! All amplitudes are referenced to the two outer faces of the barrier. The
//! absorption matrix is taken as the positive square root of `I - T T^dagger`,
//! which makes the rows of `[T A]` orthonormal whenever the stack is passive.

use std::ops::Mul;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::materials::{ComplexIndex, LayerStack, MaterialModel};
use crate::SPEED_OF_LIGHT;

/// Eigenvalues of `I - T T^dagger` down to `-PASSIVITY_TOLERANCE` are
/// treated as roundoff and clamped to zero.
pub const PASSIVITY_TOLERANCE: f64 = 1e-10;

/// Below this, eigenvalues of `I - T T^dagger` are indistinguishable from
/// zero in double precision.
const ROUNDOFF_EIGENVALUE: f64 = 1e-14;

/// 2x2 complex matrix, row major.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Complex number in double-double precision.
type Cdd = Complex<TwoFloat>;

fn widen(z: Complex64) -> Cdd {
    Cdd::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn round(z: Cdd) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

/// Unimodular characteristic matrix relating the tangential field pair at the
/// front face of a layer (or stack) to the pair at its back face.
///
/// Products are accumulated in double-double precision: deep stop bands make
/// the entries large, and in plain doubles the cancellation in the
/// determinant would swamp the unimodularity of the product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharMatrix {
    entries: [[Cdd; 2]; 2],
}

impl CharMatrix {
    pub const IDENTITY: CharMatrix = CharMatrix {
        entries: [[DD_ONE, DD_ZERO], [DD_ZERO, DD_ONE]],
    };

    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self {
            entries: [[widen(m11), widen(m12)], [widen(m21), widen(m22)]],
        }
    }

    pub fn m11(&self) -> Complex64 {
        round(self.entries[0][0])
    }

    pub fn m12(&self) -> Complex64 {
        round(self.entries[0][1])
    }

    pub fn m21(&self) -> Complex64 {
        round(self.entries[1][0])
    }

    pub fn m22(&self) -> Complex64 {
        round(self.entries[1][1])
    }

    pub fn det(&self) -> Complex64 {
        let [[a, b], [c, d]] = self.entries;
        round(a * d - b * c)
    }
}

const DD_ZERO: Cdd = Cdd::new(TwoFloat::from_f64(0.0), TwoFloat::from_f64(0.0));
const DD_ONE: Cdd = Cdd::new(TwoFloat::from_f64(1.0), TwoFloat::from_f64(0.0));

impl Mul for CharMatrix {
    type Output = CharMatrix;

    fn mul(self, rhs: CharMatrix) -> CharMatrix {
        let (x, y) = (self.entries, rhs.entries);
        let entry = |i: usize, j: usize| x[i][0] * y[0][j] + x[i][1] * y[1][j];
        CharMatrix {
            entries: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
        }
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveFrequency(omega))
    }
}

/// Characteristic matrix of one homogeneous layer at normal incidence.
pub fn layer_char_matrix(index: ComplexIndex, thickness: f64, omega: f64) -> Result<CharMatrix> {
    check_omega(omega)?;
    if !(thickness.is_finite() && thickness >= 0.0) {
        return Err(Error::InvalidStack(format!("invalid thickness {thickness}")));
    }
    let n = index.as_complex();
    let delta = n * (omega * thickness / SPEED_OF_LIGHT);
    let (sin, cos) = (delta.sin(), delta.cos());
    Ok(CharMatrix::new(cos, -I * sin / n, -I * n * sin, cos))
}

/// Product of the layer matrices in spatial order, left face to right face.
pub fn stack_char_matrix(stack: &LayerStack, omega: f64) -> Result<CharMatrix> {
    check_omega(omega)?;
    stack.layers().iter().try_fold(CharMatrix::IDENTITY, |acc, layer| {
        let n = layer.material.index(omega)?;
        Ok(acc * layer_char_matrix(n, layer.thickness, omega)?)
    })
}

/// Amplitude coefficients of a stack, referenced face to face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackResponse {
    /// Reflection of a wave incident from the left.
    pub r_left: Complex64,
    /// Transmission of a wave incident from the left.
    pub t_left: Complex64,
    /// Reflection of a wave incident from the right.
    pub r_right: Complex64,
    /// Transmission of a wave incident from the right.
    pub t_right: Complex64,
}

fn ambient_admittance(model: &MaterialModel, omega: f64) -> Result<Complex64> {
    Ok(model.index(omega)?.as_complex())
}

fn one_sided(m: &CharMatrix, qa: Complex64, qb: Complex64, omega: f64) -> Result<(Complex64, Complex64)> {
    let front = qa * (m.m11() + m.m12() * qb);
    let back = m.m21() + m.m22() * qb;
    let den = front + back;
    if !(den.norm().is_finite() && den.norm() > f64::MIN_POSITIVE) {
        return Err(Error::SingularTransfer { omega });
    }
    Ok(((front - back) / den, 2.0 * qa / den))
}

/// Reflection and transmission amplitudes for incidence from both sides.
pub fn stack_transfer(stack: &LayerStack, omega: f64) -> Result<StackResponse> {
    let qa = ambient_admittance(stack.ambient_left(), omega)?;
    let qb = ambient_admittance(stack.ambient_right(), omega)?;
    let forward = stack_char_matrix(stack, omega)?;
    let backward = stack_char_matrix(&stack.mirrored(), omega)?;
    let (r_left, t_left) = one_sided(&forward, qa, qb, omega)?;
    let (r_right, t_right) = one_sided(&backward, qb, qa, omega)?;
    Ok(StackResponse {
        r_left,
        t_left,
        r_right,
        t_right,
    })
}

/// Input-output matrix `T` and absorption matrix `A` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterMatrices {
    pub omega: f64,
    pub t: Mat2,
    pub a: Mat2,
}

impl ScatterMatrices {
    /// Transmission from the right input into the left output.
    pub fn t12(&self) -> Complex64 {
        self.t[0][1]
    }

    /// Transmission from the left input into the right output.
    pub fn t21(&self) -> Complex64 {
        self.t[1][0]
    }

    /// Squared norms of the two rows of `[T A]`.
    pub fn row_norms(&self) -> [f64; 2] {
        let row = |i: usize| {
            self.t[i].iter().chain(self.a[i].iter()).map(|z| z.norm_sqr()).sum()
        };
        [row(0), row(1)]
    }

    /// Inner product of the two rows of `[T A]`.
    pub fn row_overlap(&self) -> Complex64 {
        (0..2)
            .map(|j| self.t[0][j] * self.t[1][j].conj() + self.a[0][j] * self.a[1][j].conj())
            .sum()
    }

    /// Eigenvalues of `I - T T^dagger` in ascending order.
    pub fn passivity_eigenvalues(&self) -> [f64; 2] {
        hermitian_eigenvalues(&loss_matrix(&self.t))
    }
}

fn mat_mul_adjoint(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = x[i][0] * y[j][0].conj() + x[i][1] * y[j][1].conj();
        }
    }
    out
}

/// `I - T T^dagger`, Hermitian by construction.
fn loss_matrix(t: &Mat2) -> Mat2 {
    let ttd = mat_mul_adjoint(t, t);
    let a = 1.0 - ttd[0][0].re;
    let d = 1.0 - ttd[1][1].re;
    let b = -(ttd[0][1] + ttd[1][0].conj()) * 0.5;
    [[Complex64::new(a, 0.0), b], [b.conj(), Complex64::new(d, 0.0)]]
}

fn hermitian_eigenvalues(h: &Mat2) -> [f64; 2] {
    let a = h[0][0].re;
    let d = h[1][1].re;
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + h[0][1].norm_sqr()).sqrt();
    [mean - radius, mean + radius]
}

/// Positive square root of the Hermitian loss matrix via its spectral projectors.
fn loss_matrix_sqrt(h: &Mat2, omega: f64) -> Result<Mat2> {
    let [lo, hi] = hermitian_eigenvalues(h);
    if lo < -PASSIVITY_TOLERANCE {
        return Err(Error::PassivityViolation {
            omega,
            eigenvalue: lo,
        });
    }
    let clamp = |x: f64| if x < ROUNDOFF_EIGENVALUE { 0.0 } else { x };
    let (s_lo, s_hi) = (clamp(lo).sqrt(), clamp(hi).sqrt());

    let gap = hi - lo;
    if gap <= ROUNDOFF_EIGENVALUE {
        let s = clamp(0.5 * (lo + hi)).sqrt();
        return Ok([[Complex64::new(s, 0.0), ZERO], [ZERO, Complex64::new(s, 0.0)]]);
    }
    // P_hi = (H - lo I) / gap, P_lo = I - P_hi
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            let p_hi = (h[i][j] - lo * id) / gap;
            let p_lo = Complex64::new(id, 0.0) - p_hi;
            out[i][j] = p_hi * s_hi + p_lo * s_lo;
        }
    }
    Ok(out)
}

/// Assembles `T` and the compatible absorption matrix `A`.
///
/// Transmission entries are flux normalized with the ambient indices so that
/// `T12 = T21` for reciprocal media even when the ambients differ.
pub fn scattering_matrices(stack: &LayerStack, omega: f64) -> Result<ScatterMatrices> {
    let resp = stack_transfer(stack, omega)?;
    let qa = stack.ambient_left().index(omega)?.beta;
    let qb = stack.ambient_right().index(omega)?.beta;
    let t = [
        [resp.r_left, resp.t_right * (qa / qb).sqrt()],
        [resp.t_left * (qb / qa).sqrt(), resp.r_right],
    ];
    let a = loss_matrix_sqrt(&loss_matrix(&t), omega)?;
    Ok(ScatterMatrices { omega, t, a })
}

/// `T12` on every frequency of a strictly increasing positive grid.
pub fn transmittance_scan(stack: &LayerStack, grid: &[f64]) -> Result<Vec<Complex64>> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty frequency grid".into()));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(
            "frequency grid must be positive and strictly increasing".into(),
        ));
    }
    grid.par_iter()
        .map(|&w| scattering_matrices(stack, w).map(|s| s.t12()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{build_quarter_wave_stack, Layer};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    const CARRIER: f64 = 5.37e15 / 2.0;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn zero_thickness_is_identity() {
        let m = layer_char_matrix(ComplexIndex::new(2.0, 0.3), 0.0, 1e15).unwrap();
        assert_eq!(m, CharMatrix::IDENTITY);
    }

    #[test]
    fn vacuum_quarter_wave_matrix() {
        let d = FRAC_PI_2 * SPEED_OF_LIGHT / CARRIER;
        let m = layer_char_matrix(ComplexIndex::VACUUM, d, CARRIER).unwrap();
        assert!(close(m.m11(), ZERO, 1e-15));
        assert!(close(m.m12(), -I, 1e-15));
        assert!(close(m.m21(), -I, 1e-15));
        assert!(close(m.m22(), ZERO, 1e-15));
    }

    #[test]
    fn high_index_quarter_wave_matrix() {
        let n = 2.22;
        let d = FRAC_PI_2 * SPEED_OF_LIGHT / (CARRIER * n);
        let m = layer_char_matrix(ComplexIndex::lossless(n), d, CARRIER).unwrap();
        assert!(close(m.m11(), ZERO, 1e-15));
        assert!(close(m.m12(), -I / n, 1e-15));
        assert!(close(m.m21(), -I * n, 1e-14));
        assert!(close(m.det(), ONE, 1e-14));
    }

    #[test]
    fn empty_stack_is_transparent() {
        let r = stack_transfer(&LayerStack::empty(), CARRIER).unwrap();
        assert_eq!(r.t_left, ONE);
        assert_eq!(r.r_left, ZERO);
        assert_eq!(r.t_right, ONE);
        assert_eq!(r.r_right, ZERO);

        let s = scattering_matrices(&LayerStack::empty(), CARRIER).unwrap();
        assert_eq!(s.t, [[ZERO, ONE], [ONE, ZERO]]);
        assert_eq!(s.a, [[ZERO; 2]; 2]);
    }

    #[test]
    fn index_matched_layer_only_delays() {
        let d = 1.234e-6;
        let stack = LayerStack::in_vacuum(vec![Layer::new(MaterialModel::VACUUM, d)]).unwrap();
        let r = stack_transfer(&stack, CARRIER).unwrap();
        let expected = Complex64::new(0.0, CARRIER * d / SPEED_OF_LIGHT).exp();
        assert!(close(r.t_left, expected, 1e-14));
        assert!(r.r_left.norm() < 1e-15);
    }

    #[test]
    fn single_quarter_wave_slab() {
        let n = 2.22;
        let h = MaterialModel::constant(n, 0.0).unwrap();
        let d = crate::materials::quarter_wave_thickness(&h, CARRIER).unwrap();
        let stack = LayerStack::in_vacuum(vec![Layer::new(h, d)]).unwrap();
        let r = stack_transfer(&stack, CARRIER).unwrap();
        let expected = ((1.0 - n * n) / (1.0 + n * n)).powi(2);
        assert_relative_eq!(r.r_left.norm_sqr(), expected, epsilon = 1e-12);
        assert_relative_eq!(r.r_left.norm_sqr(), 0.4390, epsilon = 1e-4);
        assert_relative_eq!(r.t_left.norm_sqr(), 0.5610, epsilon = 1e-4);
    }

    #[test]
    fn lossless_stack_has_zero_absorption_matrix() {
        let h = MaterialModel::constant(2.22, 0.0).unwrap();
        let l = MaterialModel::constant(1.41, 0.0).unwrap();
        let stack = build_quarter_wave_stack(5, &h, &l, CARRIER).unwrap();
        for w in [0.5, 0.93, 1.0, 1.31] {
            let s = scattering_matrices(&stack, w * CARRIER).unwrap();
            for row in s.a {
                for z in row {
                    assert!(z.norm() < 1e-10, "A entry {z}");
                }
            }
        }
    }

    #[test]
    fn lossy_stack_rows_orthonormal() {
        let h = MaterialModel::constant(2.22, 0.0).unwrap();
        let l = MaterialModel::constant(1.41, 0.0372).unwrap();
        let stack = build_quarter_wave_stack(5, &h, &l, CARRIER).unwrap();
        let s = scattering_matrices(&stack, CARRIER).unwrap();
        let [n0, n1] = s.row_norms();
        assert!((n0 - 1.0).abs() < 1e-10 && (n1 - 1.0).abs() < 1e-10);
        assert!(s.row_overlap().norm() < 1e-10);
        assert!(s.a[0][0].re > 0.0, "absorption must show up in A");
    }

    #[test]
    fn unequal_ambients_stay_reciprocal_and_unitary() {
        let glass = MaterialModel::constant(1.5, 0.0).unwrap();
        let h = MaterialModel::constant(2.22, 0.0).unwrap();
        let stack = LayerStack::new(
            vec![Layer::new(h, 80e-9), Layer::new(glass, 200e-9)],
            MaterialModel::VACUUM,
            glass,
        )
        .unwrap();
        let s = scattering_matrices(&stack, CARRIER).unwrap();
        assert!((s.t12() - s.t21()).norm() < 1e-12);
        let [n0, n1] = s.row_norms();
        assert!((n0 - 1.0).abs() < 1e-12 && (n1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transmittance_scan_rejects_bad_grids() {
        let stack = LayerStack::empty();
        assert!(transmittance_scan(&stack, &[]).is_err());
        assert!(transmittance_scan(&stack, &[1.0, 1.0]).is_err());
        assert!(transmittance_scan(&stack, &[-1.0, 1.0]).is_err());
        let t = transmittance_scan(&stack, &[1e15, 2e15, 3e15]).unwrap();
        assert!(t.iter().all(|&z| z == ONE));
    }

    #[test]
    fn passivity_violation_detected() {
        let t = [[ZERO, Complex64::new(1.1, 0.0)], [Complex64::new(1.1, 0.0), ZERO]];
        let err = loss_matrix_sqrt(&loss_matrix(&t), 1.0).unwrap_err();
        assert!(matches!(err, Error::PassivityViolation { .. }));
    }
}
