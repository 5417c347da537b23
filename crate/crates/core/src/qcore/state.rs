use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::subset::{gather_bits, QubitSubset};
use crate::error::{Error, Result};

/// Accepted deviation of a raw input norm from 1 before it is rescaled.
pub const NORM_REJECT_TOL: f64 = 1e-6;

/// Normalized amplitude vector over `num_qubits` qubits.
///
/// Qubit 0 is the most significant bit of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from raw amplitudes. Inputs whose norm is within
    /// [`NORM_REJECT_TOL`] of 1 are renormalized; anything further off is
    /// rejected as a caller bug.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = register_size(amplitudes.len())?;
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_REJECT_TOL {
            return Err(Error::BadNorm { norm });
        }
        let mut state = Self {
            num_qubits,
            amplitudes,
        };
        state.rescale(norm);
        Ok(state)
    }

    /// Normalizes an arbitrary nonzero vector. Used for sampling, where the raw
    /// draw has no meaningful norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = register_size(amplitudes.len())?;
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::BadNorm { norm });
        }
        let mut state = Self {
            num_qubits,
            amplitudes,
        };
        state.rescale(norm);
        Ok(state)
    }

    /// Amplitudes known to be normalized (e.g. a unitary image of a state).
    pub(crate) fn from_unit_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits >= usize::BITS as usize {
            return Err(Error::InvalidArgument(format!(
                "register of {num_qubits} qubits"
            )));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self::from_unit_amplitudes(num_qubits, amplitudes))
    }

    /// Single qubit `a|0⟩ + b|1⟩`.
    pub fn qubit(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(vec![a, b])
    }

    /// Single qubit at polar angle `theta` and azimuth `phi` on the Bloch sphere:
    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn from_bloch_angles(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::from_unit_amplitudes(
            1,
            vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`; the qubits of `self` come first (most significant).
    pub fn tensor(&self, other: &PureState) -> PureState {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self::from_unit_amplitudes(self.num_qubits + other.num_qubits, amplitudes)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityMatrix::from_hermitian_unchecked(&v * v.adjoint())
    }

    /// Reduced state on `keep`, computed straight from the amplitudes.
    ///
    /// The amplitudes are reshaped into a `d_keep × d_rest` matrix `M` and the
    /// result is `M M†`; the full `2^n × 2^n` projector is never formed.
    pub fn partial_trace(&self, keep: &QubitSubset) -> Result<DensityMatrix> {
        if keep.num_qubits() != self.num_qubits {
            return Err(Error::InvalidSubsystem(format!(
                "subset addresses a {}-qubit register, state has {}",
                keep.num_qubits(),
                self.num_qubits
            )));
        }
        let n = self.num_qubits;
        let rest = keep.complement();
        let d_keep = 1usize << keep.len();
        let d_rest = 1usize << rest.len();
        let mut m = DMatrix::<Complex64>::zeros(d_keep, d_rest);
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let i = gather_bits(idx, keep.indices(), n);
            let r = gather_bits(idx, &rest, n);
            m[(i, r)] = *amp;
        }
        Ok(DensityMatrix::from_hermitian_unchecked(&m * m.adjoint()))
    }

    fn rescale(&mut self, norm: f64) {
        let inv = 1.0 / norm;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
    }
}

/// Free-function form of [`PureState::tensor`].
pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    a.tensor(b)
}

fn register_size(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len });
    }
    Ok(len.trailing_zeros() as usize)
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}
