//! Typicality of environment subsystems: Haar-random environment states,
//! reduced subsystem states, their trace distance to the maximally mixed state,
//! and how that distance behaves under the central-spin dynamics.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::centralspin::{CentralSpinModel, TimeGrid};
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, PureState, QubitSubset};

/// Source of environment states indexed by sample number.
///
/// `state(i)` must depend only on `i` and the source's own configuration, so
/// samples can be generated in any order.
pub trait EnvironmentEnsemble: Sync {
    fn num_qubits(&self) -> usize;
    fn state(&self, index: u64) -> PureState;
}

/// Haar-random pure states on `num_qubits` qubits.
///
/// Sample `i` comes from its own ChaCha stream keyed by `(seed, counter + i)`,
/// which makes every sample reproducible on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarSampler {
    num_qubits: usize,
    seed: u64,
    counter: u64,
}

impl HaarSampler {
    pub fn new(num_qubits: usize, seed: u64) -> Result<Self> {
        if num_qubits == 0 || num_qubits >= usize::BITS as usize {
            return Err(Error::InvalidArgument(format!(
                "Haar sampler over {num_qubits} qubits"
            )));
        }
        Ok(Self {
            num_qubits,
            seed,
            counter: 0,
        })
    }

    pub fn with_counter(mut self, counter: u64) -> Self {
        self.counter = counter;
        self
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Next sample; advances the counter.
    pub fn sample(&mut self) -> PureState {
        let s = self.sample_at(self.counter);
        self.counter += 1;
        s
    }

    /// Sample number `index` of this seed, ignoring the counter.
    pub fn sample_at(&self, index: u64) -> PureState {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let amps: Vec<Complex64> = (0..self.dim())
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        // a Gaussian vector is zero with probability 0
        PureState::normalized(amps).expect("nonzero Gaussian draw")
    }
}

impl EnvironmentEnsemble for HaarSampler {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn state(&self, index: u64) -> PureState {
        self.sample_at(self.counter + index)
    }
}

/// The same state for every sample; a product environment viewed as a
/// (degenerate) ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedEnvironment(pub PureState);

impl EnvironmentEnsemble for FixedEnvironment {
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn state(&self, _index: u64) -> PureState {
        self.0.clone()
    }
}

/// A proper subsystem `e₁` of a register and its complement `Ẽ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemSplit {
    subsystem: QubitSubset,
}

impl SubsystemSplit {
    pub fn new(subsystem: QubitSubset) -> Result<Self> {
        if subsystem.len() >= subsystem.num_qubits() {
            return Err(Error::InvalidSubsystem(format!(
                "subsystem of {} qubits leaves no complement in a {}-qubit register",
                subsystem.len(),
                subsystem.num_qubits()
            )));
        }
        Ok(Self { subsystem })
    }

    pub fn from_indices(
        indices: impl IntoIterator<Item = usize>,
        num_qubits: usize,
    ) -> Result<Self> {
        Self::new(QubitSubset::new(indices, num_qubits)?)
    }

    pub fn subsystem(&self) -> &QubitSubset {
        &self.subsystem
    }

    pub fn num_qubits(&self) -> usize {
        self.subsystem.num_qubits()
    }

    /// `d_e1 = 2^k`.
    pub fn subsystem_dim(&self) -> usize {
        1 << self.subsystem.len()
    }

    /// `d_Ẽ = 2^(n-k)`.
    pub fn complement_dim(&self) -> usize {
        1 << (self.subsystem.num_qubits() - self.subsystem.len())
    }

    /// The same qubits seen from a register with `offset` extra qubits in front.
    pub fn shifted(&self, offset: usize) -> Result<Self> {
        Self::from_indices(
            self.subsystem.indices().iter().map(|q| q + offset),
            self.num_qubits() + offset,
        )
    }
}

/// Upper bound on the mean trace distance between a Haar subsystem state and
/// the maximally mixed state: `(d_e1 / 2) · sqrt(1 / d_Ẽ)`.
pub fn bound(split: &SubsystemSplit) -> f64 {
    0.5 * split.subsystem_dim() as f64 * (1.0 / split.complement_dim() as f64).sqrt()
}

/// Monte Carlo summary of trace distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceStats {
    pub sample_count: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(sample_count)`.
    pub std_error: f64,
    pub max: f64,
    pub bound_value: f64,
}

impl DistanceStats {
    pub fn from_samples(values: &[f64], bound_value: f64) -> Result<Self> {
        let (mean, std_error) = mean_and_std_error(values)?;
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            sample_count: values.len(),
            mean,
            std_error,
            max,
            bound_value,
        })
    }

    /// `mean ≤ bound + sigmas · std_error`.
    pub fn within_bound(&self, sigmas: f64) -> bool {
        self.mean <= self.bound_value + sigmas * self.std_error
    }
}

/// Sample mean and standard error (`n - 1` normalization).
pub fn mean_and_std_error(values: &[f64]) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, (var / n as f64).sqrt()))
}

/// Reduced state of `psi` on the split's subsystem, checked against the
/// density-matrix invariants.
pub fn subsystem_state(psi: &PureState, split: &SubsystemSplit) -> Result<DensityMatrix> {
    let rho = psi.partial_trace(split.subsystem())?;
    rho.validate()?;
    Ok(rho)
}

/// Trace distance of every sample's subsystem state from `I / d_e1`, in sample
/// order.
pub fn sample_distances<E: EnvironmentEnsemble>(
    split: &SubsystemSplit,
    samples: usize,
    ensemble: &E,
) -> Result<Vec<f64>> {
    check_ensemble(split, ensemble)?;
    let omega = DensityMatrix::maximally_mixed(split.subsystem_dim())?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| subsystem_state(&ensemble.state(i), split)?.trace_distance(&omega))
        .collect()
}

/// Mean, standard error and maximum of `D(ρ_e1, I/d_e1)` over `samples`
/// environment states, with the bound for the split attached.
pub fn mc_average_distance<E: EnvironmentEnsemble>(
    split: &SubsystemSplit,
    samples: usize,
    ensemble: &E,
) -> Result<DistanceStats> {
    check_samples(samples)?;
    let d = sample_distances(split, samples, ensemble)?;
    DistanceStats::from_samples(&d, bound(split))
}

/// Mean and standard error of the subsystem entropy (bits).
pub fn mc_subsystem_entropy<E: EnvironmentEnsemble>(
    split: &SubsystemSplit,
    samples: usize,
    ensemble: &E,
) -> Result<(f64, f64)> {
    check_samples(samples)?;
    check_ensemble(split, ensemble)?;
    let s: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| Ok(subsystem_state(&ensemble.state(i), split)?.von_neumann_entropy()))
        .collect::<Result<_>>()?;
    mean_and_std_error(&s)
}

/// Distance statistics of an environment subsystem over time while the
/// environment decoheres `central`.
///
/// `split` addresses the full `N + 1` qubit register and may not include the
/// central spin (qubit 0). Each sample is `central ⊗ ψ_E`, evolved to every
/// grid time and reduced onto the split. The attached bound is that of the
/// same qubits within the environment register alone.
pub fn persistence_experiment<E: EnvironmentEnsemble>(
    model: &CentralSpinModel,
    split: &SubsystemSplit,
    samples: usize,
    grid: &TimeGrid,
    ensemble: &E,
    central: &PureState,
) -> Result<Vec<(f64, DistanceStats)>> {
    check_samples(samples)?;
    if split.num_qubits() != model.num_qubits() {
        return Err(Error::InvalidSubsystem(format!(
            "split addresses {} qubits, model register has {}",
            split.num_qubits(),
            model.num_qubits()
        )));
    }
    if split.subsystem().contains(0) {
        return Err(Error::InvalidSubsystem(
            "the central spin is not part of the environment".into(),
        ));
    }
    if ensemble.num_qubits() != model.num_env() {
        return Err(Error::DimensionMismatch {
            expected: model.num_env(),
            found: ensemble.num_qubits(),
        });
    }
    let prop = model.propagator();
    let omega = DensityMatrix::maximally_mixed(split.subsystem_dim())?;
    let per_sample: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let psi0 = model.initial_state(central, &ensemble.state(i))?;
            grid.times()
                .iter()
                .map(|&t| subsystem_state(&prop.apply(&psi0, t)?, split)?.trace_distance(&omega))
                .collect()
        })
        .collect::<Result<_>>()?;
    // Ẽ is the rest of the environment; the central spin is not part of it
    let env_split = SubsystemSplit::from_indices(
        split.subsystem().indices().iter().map(|q| q - 1),
        model.num_env(),
    )?;
    let bound_value = bound(&env_split);
    grid.times()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let column: Vec<f64> = per_sample.iter().map(|row| row[k]).collect();
            Ok((t, DistanceStats::from_samples(&column, bound_value)?))
        })
        .collect()
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    Ok(())
}

fn check_ensemble<E: EnvironmentEnsemble>(split: &SubsystemSplit, ensemble: &E) -> Result<()> {
    if ensemble.num_qubits() != split.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: split.num_qubits(),
            found: ensemble.num_qubits(),
        });
    }
    Ok(())
}
