//! Pure and mixed qutrit states in the ordered basis {|0⟩, |1⟩, |2⟩}.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::{QutritError, Result};

/// Tolerance used when validating normalization and hermiticity.
pub const STATE_TOLERANCE: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vector3<Complex64>,
}

impl Ket {
    /// Normalizes the given amplitudes.
    pub fn new(c0: Complex64, c1: Complex64, c2: Complex64) -> Result<Self> {
        Self::from_vector(Vector3::new(c0, c1, c2))
    }

    pub fn from_vector(v: Vector3<Complex64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(QutritError::ZeroVector);
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    pub fn from_real(c: [f64; 3]) -> Result<Self> {
        Self::new(c[0].into(), c[1].into(), c[2].into())
    }

    /// Basis state |k⟩.
    pub fn basis(k: usize) -> Self {
        assert!(k < 3, "qutrit basis index out of range: {k}");
        let mut v = Vector3::zeros();
        v[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    /// The equal superposition (|0⟩+|1⟩+|2⟩)/√3.
    pub fn uniform() -> Self {
        Self::from_real([1.0, 1.0, 1.0]).expect("nonzero")
    }

    pub fn amplitudes(&self) -> &Vector3<Complex64> {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            entries: self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &Ket) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// A 3×3 density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix3<Complex64>,
}

impl DensityMatrix {
    /// Validates `entries` as a density matrix.
    pub fn new(entries: Matrix3<Complex64>) -> Result<Self> {
        let herm_dev = (entries - entries.adjoint()).camax();
        if herm_dev > STATE_TOLERANCE {
            return Err(QutritError::NotHermitian(herm_dev));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > STATE_TOLERANCE || trace.im.abs() > STATE_TOLERANCE {
            return Err(QutritError::BadTrace(trace.re));
        }
        // Symmetrize before diagonalizing so round-off in the validated
        // entries cannot leak imaginary parts into the eigenvalues.
        let sym = (entries + entries.adjoint()).scale(0.5);
        let min_eig = sym
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < EIGENVALUE_FLOOR {
            return Err(QutritError::NotPositive(min_eig));
        }
        Ok(Self { entries })
    }

    /// Builds a density matrix from a positive diagonal, normalizing its trace.
    pub fn diagonal(weights: [f64; 3]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || total <= 0.0 {
            return Err(QutritError::NotPositive(
                weights.iter().copied().fold(f64::INFINITY, f64::min),
            ));
        }
        let m = Matrix3::from_diagonal(&Vector3::from_iterator(
            weights.iter().map(|w| Complex64::new(w / total, 0.0)),
        ));
        Ok(Self { entries: m })
    }

    pub fn maximally_mixed() -> Self {
        Self::diagonal([1.0; 3]).expect("valid")
    }

    /// Mixes ensemble members `Σ p_k |ψ_k⟩⟨ψ_k|` with weights renormalized.
    pub fn mixture(members: &[(f64, Ket)]) -> Result<Self> {
        let total: f64 = members.iter().map(|(p, _)| *p).sum();
        if total <= 0.0 || members.iter().any(|(p, _)| *p < 0.0) {
            return Err(QutritError::NotPositive(total));
        }
        let m = members.iter().fold(Matrix3::zeros(), |acc, (p, ket)| {
            acc + ket.density().entries.scale(p / total)
        });
        Ok(Self { entries: m })
    }

    /// Wraps a matrix already known to be a valid state (e.g. the output of a
    /// unitary channel). Only the trace is renormalized.
    pub(crate) fn from_trusted(entries: Matrix3<Complex64>) -> Self {
        let tr = entries.trace().re;
        Self {
            entries: entries.unscale(tr),
        }
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.entries
    }

    pub fn eigenvalues(&self) -> Vector3<f64> {
        let sym = (self.entries + self.entries.adjoint()).scale(0.5);
        sym.symmetric_eigenvalues()
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        (self.entries * self.entries).trace().re
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn fidelity_with(&self, ket: &Ket) -> f64 {
        let v = ket.amplitudes();
        v.dotc(&(self.entries * v)).re
    }

    /// ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = self.entries - other.entries;
        let herm = (diff + diff.adjoint()).scale(0.5);
        0.5 * herm
            .symmetric_eigenvalues()
            .iter()
            .map(|e| e.abs())
            .sum::<f64>()
    }

    /// Conjugates the state by the permutation sending basis |k⟩ to |perm[k]⟩.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let mut out = Matrix3::zeros();
        for r in 0..3 {
            for c in 0..3 {
                out[(perm[r], perm[c])] = self.entries[(r, c)];
            }
        }
        Self { entries: out }
    }

    /// Maximum elementwise deviation from another state.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (self.entries - other.entries).camax()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ket_normalizes() {
        let k = Ket::from_real([3.0, 0.0, 4.0]).unwrap();
        assert!((k.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!((k.amplitudes()[2].re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_ket_rejected() {
        assert_eq!(Ket::from_real([0.0; 3]), Err(QutritError::ZeroVector));
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = Matrix3::<Complex64>::identity();
        assert!(matches!(
            DensityMatrix::new(m),
            Err(QutritError::BadTrace(_))
        ));
        m = Matrix3::identity().scale(1.0 / 3.0);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(QutritError::NotHermitian(_))
        ));
        let neg = Matrix3::from_diagonal(&Vector3::new(
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 0.0),
        ));
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(QutritError::NotPositive(_))
        ));
        assert!(DensityMatrix::new(Ket::uniform().density().matrix().to_owned()).is_ok());
    }

    #[test]
    fn permutation_swaps_populations() {
        let rho = Ket::basis(2).density().permuted([2, 1, 0]);
        assert!(rho.max_abs_diff(&Ket::basis(0).density()) < 1e-15);
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let d = Ket::basis(0)
            .density()
            .trace_distance(&Ket::basis(1).density());
        assert!((d - 1.0).abs() < 1e-12);
    }
}
