//! Dense state-vector and density-matrix primitives.
//!
//! Register convention: qubit 0 is the most significant bit of a basis index.

mod bloch;
mod density;
mod state;
mod subset;

pub use bloch::{BlochVector, BLOCH_NORM_TOL};
pub use density::{trace_distance, DensityMatrix, EIGEN_CLAMP_TOL, STRUCTURE_TOL};
pub use state::{tensor, PureState, NORM_REJECT_TOL};
pub use subset::QubitSubset;

/// Anything that can be reduced to a subset of its qubits.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &QubitSubset) -> crate::Result<DensityMatrix>;
}

impl PartialTrace for PureState {
    fn partial_trace(&self, keep: &QubitSubset) -> crate::Result<DensityMatrix> {
        PureState::partial_trace(self, keep)
    }
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &QubitSubset) -> crate::Result<DensityMatrix> {
        DensityMatrix::partial_trace(self, keep)
    }
}

/// Free-function form of [`PartialTrace::partial_trace`].
pub fn partial_trace<S: PartialTrace + ?Sized>(
    state: &S,
    keep: &QubitSubset,
) -> crate::Result<DensityMatrix> {
    state.partial_trace(keep)
}
