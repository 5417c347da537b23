use nalgebra::DMatrix;
use num_complex::Complex64;

use super::bloch::BlochVector;
use super::subset::{scatter_bits, QubitSubset};
use crate::error::{Error, Result};

/// Hermiticity and unit-trace tolerance.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIGEN_CLAMP_TOL, 0)` are rounding noise and read as zero.
pub const EIGEN_CLAMP_TOL: f64 = 1e-9;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates and wraps `entries`.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self { entries };
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a matrix that is a density matrix by construction (e.g. `M M†`
    /// of a normalized reshaped state). Hermitian rounding error is removed.
    pub(crate) fn from_hermitian_unchecked(mut entries: DMatrix<Complex64>) -> Self {
        let d = entries.nrows();
        for i in 0..d {
            entries[(i, i)].im = 0.0;
            for j in (i + 1)..d {
                let avg = (entries[(i, j)] + entries[(j, i)].conj()) * 0.5;
                entries[(i, j)] = avg;
                entries[(j, i)] = avg.conj();
            }
        }
        Self { entries }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "maximally mixed state needs dim >= 2, got {dim}"
            )));
        }
        Ok(Self {
            entries: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        })
    }

    /// `½(I + xX + yY + zZ)`.
    pub fn from_bloch(v: &BlochVector) -> Self {
        let half = 0.5;
        let entries = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(half * (1.0 + v.z), 0.0),
                Complex64::new(half * v.x, -half * v.y),
                Complex64::new(half * v.x, half * v.y),
                Complex64::new(half * (1.0 - v.z), 0.0),
            ],
        );
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Checks Hermiticity, unit trace and numerical positivity.
    pub fn validate(&self) -> Result<()> {
        let (r, c) = self.entries.shape();
        if r != c || r < 2 {
            return Err(Error::NotDensityMatrix(format!("shape {r}x{c}")));
        }
        if self
            .entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NotDensityMatrix("non-finite entry".into()));
        }
        let herm = self.hermiticity_error();
        if herm > STRUCTURE_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "hermiticity error {herm:e}"
            )));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STRUCTURE_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let min = self
            .raw_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -EIGEN_CLAMP_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// Eigenvalues in ascending order with rounding-level negatives clamped to 0.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.raw_eigenvalues()
            .into_iter()
            .map(|l| {
                if (-EIGEN_CLAMP_TOL..0.0).contains(&l) {
                    0.0
                } else {
                    l
                }
            })
            .collect()
    }

    fn raw_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_eigenvalues(&self.entries);
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Entropy in bits, `0 log 0 = 0`.
    pub fn von_neumann_entropy(&self) -> f64 {
        let s: f64 = self
            .eigenvalues()
            .into_iter()
            .filter(|&l| l > 0.0)
            .map(|l| -l * l.log2())
            .sum();
        s.max(0.0)
    }

    /// `½ Tr|ρ − σ|`, via the eigenvalues of the Hermitian difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let diff = &self.entries - &other.entries;
        let d = 0.5
            * hermitian_eigenvalues(&diff)
                .iter()
                .map(|l| l.abs())
                .sum::<f64>();
        Ok(d.clamp(0.0, 1.0))
    }

    pub fn bloch_vector(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let off = self.entries[(0, 1)];
        Ok(BlochVector::clamped(
            2.0 * off.re,
            -2.0 * off.im,
            self.entries[(0, 0)].re - self.entries[(1, 1)].re,
        ))
    }

    /// Register size if `dim` is a power of two.
    pub fn num_qubits(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    /// `Tr_rest ρ` for the qubits in `keep`.
    pub fn partial_trace(&self, keep: &QubitSubset) -> Result<DensityMatrix> {
        let n = self.num_qubits().ok_or_else(|| {
            Error::InvalidSubsystem(format!("dimension {} is not a qubit register", self.dim()))
        })?;
        if keep.num_qubits() != n {
            return Err(Error::InvalidSubsystem(format!(
                "subset addresses a {}-qubit register, matrix has {n}",
                keep.num_qubits()
            )));
        }
        let rest = keep.complement();
        let d_keep = 1usize << keep.len();
        let d_rest = 1usize << rest.len();
        let keep_pos: Vec<usize> = (0..d_keep)
            .map(|i| scatter_bits(i, keep.indices(), n))
            .collect();
        let rest_pos: Vec<usize> = (0..d_rest).map(|r| scatter_bits(r, &rest, n)).collect();
        let mut out = DMatrix::<Complex64>::zeros(d_keep, d_keep);
        for (i, &pi) in keep_pos.iter().enumerate() {
            for (j, &pj) in keep_pos.iter().enumerate() {
                out[(i, j)] = rest_pos
                    .iter()
                    .map(|&pr| self.entries[(pi | pr, pj | pr)])
                    .sum();
            }
        }
        Ok(Self::from_hermitian_unchecked(out))
    }
}

/// Free-function form of [`DensityMatrix::trace_distance`].
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.trace_distance(sigma)
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 2 {
        // closed form; avoids the iterative solver on the Monte Carlo hot path
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)];
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return vec![mean - rad, mean + rad];
    }
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PureState;
    use approx::assert_abs_diff_eq;

    fn diag(values: &[f64]) -> DensityMatrix {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        DensityMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))).unwrap()
    }

    #[test]
    fn trace_distance_basics() {
        let zero = PureState::basis(1, 0).unwrap().projector();
        let one = PureState::basis(1, 1).unwrap().projector();
        let mm = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(zero.trace_distance(&zero).unwrap(), 0.0);
        assert_abs_diff_eq!(zero.trace_distance(&one).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(zero.trace_distance(&mm).unwrap(), 0.5, epsilon = 1e-15);
        assert!(zero
            .trace_distance(&DensityMatrix::maximally_mixed(4).unwrap())
            .is_err());
    }

    #[test]
    fn trace_distance_general_solver_path() {
        let a = diag(&[0.5, 0.25, 0.25]);
        let b = DensityMatrix::maximally_mixed(3).unwrap();
        // eigenvalues of a-b: 1/6, -1/12, -1/12
        assert_abs_diff_eq!(a.trace_distance(&b).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_values() {
        assert_abs_diff_eq!(
            PureState::basis(2, 3)
                .unwrap()
                .projector()
                .von_neumann_entropy(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            DensityMatrix::maximally_mixed(2)
                .unwrap()
                .von_neumann_entropy(),
            1.0,
            epsilon = 1e-12
        );
        for n in 1..=4 {
            let mm = DensityMatrix::maximally_mixed(1 << n).unwrap();
            assert_abs_diff_eq!(mm.von_neumann_entropy(), n as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn purity_values() {
        assert_abs_diff_eq!(
            PureState::basis(1, 0).unwrap().projector().purity(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            DensityMatrix::maximally_mixed(2).unwrap().purity(),
            0.5,
            epsilon = 1e-15
        );
        let (a2, b2) = (0.36, 0.64);
        assert_abs_diff_eq!(diag(&[a2, b2]).purity(), a2 * a2 + b2 * b2, epsilon = 1e-15);
    }

    #[test]
    fn bloch_conventions() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cases = [
            (DensityMatrix::maximally_mixed(2).unwrap(), (0.0, 0.0, 0.0)),
            (PureState::basis(1, 0).unwrap().projector(), (0.0, 0.0, 1.0)),
            (
                PureState::qubit(Complex64::new(s, 0.0), Complex64::new(s, 0.0))
                    .unwrap()
                    .projector(),
                (1.0, 0.0, 0.0),
            ),
            (
                PureState::qubit(Complex64::new(s, 0.0), Complex64::new(0.0, s))
                    .unwrap()
                    .projector(),
                (0.0, 1.0, 0.0),
            ),
        ];
        for (rho, (x, y, z)) in cases {
            let v = rho.bloch_vector().unwrap();
            assert_abs_diff_eq!(v.x, x, epsilon = 1e-15);
            assert_abs_diff_eq!(v.y, y, epsilon = 1e-15);
            assert_abs_diff_eq!(v.z, z, epsilon = 1e-15);
        }
        assert!(DensityMatrix::maximally_mixed(4)
            .unwrap()
            .bloch_vector()
            .is_err());
    }

    #[test]
    fn maximally_mixed_rejects_small_dim() {
        assert!(DensityMatrix::maximally_mixed(1).is_err());
        let mm = DensityMatrix::maximally_mixed(8).unwrap();
        assert_abs_diff_eq!(mm.von_neumann_entropy(), 3.0, epsilon = 1e-12);
        assert_eq!(mm.trace_distance(&mm).unwrap(), 0.0);
    }

    #[test]
    fn validation_catches_violations() {
        let not_herm = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(0.1, 0.0),
                Complex64::new(0.2, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        assert!(DensityMatrix::new(not_herm).is_err());
        let bad_trace = DMatrix::identity(2, 2) * Complex64::new(0.6, 0.0);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(negative).is_err());
    }

    #[test]
    fn tiny_negative_eigenvalues_are_clamped() {
        let rho = DensityMatrix::from_hermitian_unchecked(DMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![
                Complex64::new(1.0 + 5e-10, 0.0),
                Complex64::new(-5e-10, 0.0),
            ]),
        ));
        assert!(rho.validate().is_ok());
        assert_eq!(rho.eigenvalues()[0], 0.0);
        assert!(rho.von_neumann_entropy() >= 0.0);
    }
}
