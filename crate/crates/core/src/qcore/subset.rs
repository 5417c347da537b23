use crate::error::{Error, Result};

/// A sorted, non-empty set of distinct qubit positions inside a register of
/// `num_qubits` qubits. Qubit 0 is the most significant bit of a basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitSubset {
    indices: Vec<usize>,
    num_qubits: usize,
}

impl QubitSubset {
    pub fn new(indices: impl IntoIterator<Item = usize>, num_qubits: usize) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(Error::InvalidSubsystem("empty qubit set".into()));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubsystem(format!(
                "duplicate qubit index in {indices:?}"
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::InvalidSubsystem(format!(
                "qubit {bad} outside register of {num_qubits} qubits"
            )));
        }
        Ok(Self {
            indices,
            num_qubits,
        })
    }

    /// The single qubit `q`.
    pub fn single(q: usize, num_qubits: usize) -> Result<Self> {
        Self::new([q], num_qubits)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.binary_search(&q).is_ok()
    }

    /// Qubits of the register not in this subset, ascending. May be empty.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.num_qubits)
            .filter(|q| !self.contains(*q))
            .collect()
    }
}

/// Bit shift (from the least significant end) of qubit `q` in an `n`-qubit register.
#[inline]
pub(crate) fn bit_shift(q: usize, n: usize) -> usize {
    n - 1 - q
}

/// Packs the bits of `index` at the given qubits into a compact integer, first
/// qubit most significant.
#[inline]
pub(crate) fn gather_bits(index: usize, qubits: &[usize], n: usize) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((index >> bit_shift(q, n)) & 1))
}

/// Inverse of [`gather_bits`]: spreads the bits of `packed` onto the given qubits.
#[inline]
pub(crate) fn scatter_bits(packed: usize, qubits: &[usize], n: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
        acc | (((packed >> (k - 1 - pos)) & 1) << bit_shift(q, n))
    })
}
