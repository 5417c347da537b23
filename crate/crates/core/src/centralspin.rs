//! Pure-dephasing central-spin model.
//!
//! `H = ½ σ_z ⊗ Σ_i g_i σ_z^(i)` is diagonal in the computational basis, so
//! time evolution is a per-amplitude phase. The central spin is qubit 0 of an
//! `N + 1` qubit register and environment spin `i` (0-based) is qubit `i + 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::{BlochVector, DensityMatrix, PureState, QubitSubset, NORM_REJECT_TOL};

/// Default `|r(t)|` threshold at which the central spin counts as decohered.
pub const DEFAULT_EPSILON: f64 = 0.01;
/// Default number of points on the decoherence-time search grid.
pub const DEFAULT_SEARCH_POINTS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct CentralSpinModel {
    couplings: Vec<f64>,
}

impl CentralSpinModel {
    pub fn new(couplings: Vec<f64>) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::InvalidArgument(
                "model needs at least one environment spin".into(),
            ));
        }
        if couplings.len() >= usize::BITS as usize - 1 {
            return Err(Error::InvalidArgument(format!(
                "{} environment spins do not fit a dense register",
                couplings.len()
            )));
        }
        if let Some(g) = couplings.iter().find(|g| !g.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coupling {g}")));
        }
        Ok(Self { couplings })
    }

    /// Couplings drawn i.i.d. uniform on `(0, 1]` from a seeded stream.
    pub fn uniform(num_env: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // random::<f64>() is in [0, 1); flip to (0, 1]
        let couplings = (0..num_env).map(|_| 1.0 - rng.random::<f64>()).collect();
        Self::new(couplings)
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn num_env(&self) -> usize {
        self.couplings.len()
    }

    /// Register size including the central spin.
    pub fn num_qubits(&self) -> usize {
        self.couplings.len() + 1
    }

    /// False for the null-coupling model, which never decoheres anything.
    pub fn is_decohering(&self) -> bool {
        self.couplings.iter().any(|&g| g != 0.0)
    }

    pub fn mean_abs_coupling(&self) -> f64 {
        self.couplings.iter().map(|g| g.abs()).sum::<f64>() / self.couplings.len() as f64
    }

    /// Energy of the computational basis state `basis_index`: `½ s₀ Σ g_i s_i`
    /// with bit 0 ↦ +1 and bit 1 ↦ −1.
    pub fn hamiltonian_phase(&self, basis_index: usize) -> Result<f64> {
        let n = self.num_qubits();
        let dim = 1usize << n;
        if basis_index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {basis_index} outside dimension {dim}"
            )));
        }
        let spin = |q: usize| {
            if (basis_index >> (n - 1 - q)) & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let env: f64 = self
            .couplings
            .iter()
            .enumerate()
            .map(|(i, g)| g * spin(i + 1))
            .sum();
        Ok(0.5 * spin(0) * env)
    }

    /// All `2^(N+1)` diagonal energies, in register order.
    pub fn energies(&self) -> Vec<f64> {
        // Σ g_i s_i over environment patterns, built one spin at a time so that
        // spin 0 ends up most significant
        let mut env = vec![0.0f64];
        for &g in &self.couplings {
            env = env.iter().flat_map(|&s| [s + g, s - g]).collect();
        }
        env.iter()
            .map(|s| 0.5 * s)
            .chain(env.iter().map(|s| -0.5 * s))
            .collect()
    }

    pub fn propagator(&self) -> Propagator {
        Propagator {
            num_qubits: self.num_qubits(),
            energies: self.energies(),
        }
    }

    /// `e^{-iHt} ψ0`.
    pub fn evolve(&self, psi0: &PureState, t: f64) -> Result<PureState> {
        self.propagator().apply(psi0, t)
    }

    /// `r(t) = ⟨E₋(t)|E₊(t)⟩ = Π_i (|a_i|² e^{-i g_i t} + |b_i|² e^{+i g_i t})`.
    pub fn decoherence_factor(&self, env: &ProductEnvironment, t: f64) -> Result<Complex64> {
        self.check_env(env)?;
        if t == 0.0 {
            // the per-spin weights sum to 1 only up to rounding
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(self
            .couplings
            .iter()
            .zip(env.spins())
            .map(|(&g, (a, b))| {
                Complex64::from_polar(a.norm_sqr(), -g * t)
                    + Complex64::from_polar(b.norm_sqr(), g * t)
            })
            .product())
    }

    /// `⟨E₋(t)|E₊(t)⟩ = Σ_j |c_j|² e^{-i S_j t}` for an arbitrary (possibly
    /// entangled) environment state `Σ_j c_j |j⟩`, with `S_j = Σ_i g_i s_i(j)`.
    pub fn environment_overlap(&self, env: &PureState, t: f64) -> Result<Complex64> {
        if env.num_qubits() != self.num_env() {
            return Err(Error::DimensionMismatch {
                expected: self.num_env(),
                found: env.num_qubits(),
            });
        }
        // the |0⟩-branch half of the energy table is ½ S_j
        let energies = self.energies();
        Ok(env
            .amplitudes()
            .iter()
            .zip(&energies)
            .map(|(c, &half_s)| Complex64::from_polar(c.norm_sqr(), -2.0 * half_s * t))
            .sum())
    }

    /// Decoherence-time search driven by [`Self::environment_overlap`].
    pub fn decoherence_time_for_state(
        &self,
        env: &PureState,
        epsilon: f64,
        search: &TimeGrid,
    ) -> Result<DecoherenceTime> {
        let factors = search
            .times()
            .iter()
            .map(|&t| self.environment_overlap(env, t))
            .collect::<Result<Vec<_>>>()?;
        first_below(search, &factors, epsilon)
    }

    /// Reduced state of the central spin.
    pub fn central_state(&self, psi_t: &PureState) -> Result<DensityMatrix> {
        self.check_register(psi_t)?;
        psi_t.partial_trace(&QubitSubset::single(0, self.num_qubits())?)
    }

    /// `central ⊗ env`; both branches of the initial state share the same
    /// environment.
    pub fn initial_state(&self, central: &PureState, env: &PureState) -> Result<PureState> {
        if central.num_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: central.num_qubits(),
            });
        }
        if env.num_qubits() != self.num_env() {
            return Err(Error::DimensionMismatch {
                expected: self.num_env(),
                found: env.num_qubits(),
            });
        }
        Ok(central.tensor(env))
    }

    /// Normalized environment branches `(E₊, E₋)` of a full-register state.
    /// A branch with zero weight is reported as `None`.
    pub fn branch_states(&self, psi: &PureState) -> Result<(Option<PureState>, Option<PureState>)> {
        self.check_register(psi)?;
        let half = psi.dim() / 2;
        let (up, down) = psi.amplitudes().split_at(half);
        Ok((branch(up), branch(down)))
    }

    /// Central-spin Bloch trajectory for `central ⊗ env` over `grid`.
    ///
    /// Time points are evaluated independently and in parallel; the output is
    /// in grid order and identical to a sequential evaluation.
    pub fn bloch_trajectory(
        &self,
        central: &PureState,
        env: &ProductEnvironment,
        grid: &TimeGrid,
    ) -> Result<Vec<TrajectoryPoint>> {
        self.check_env(env)?;
        self.trajectory_of(&self.initial_state(central, &env.to_state())?, grid)
    }

    /// Central-spin trajectory of an arbitrary full-register initial state.
    pub fn trajectory_of(&self, psi0: &PureState, grid: &TimeGrid) -> Result<Vec<TrajectoryPoint>> {
        self.check_register(psi0)?;
        let prop = self.propagator();
        let subset = QubitSubset::single(0, self.num_qubits())?;
        grid.times()
            .par_iter()
            .map(|&t| {
                let rho = prop.apply(psi0, t)?.partial_trace(&subset)?;
                Ok(TrajectoryPoint {
                    t,
                    bloch: rho.bloch_vector()?,
                    purity: rho.purity(),
                })
            })
            .collect()
    }

    /// First time on the default search grid at which `|r(t)| ≤ epsilon`.
    pub fn decoherence_time(
        &self,
        env: &ProductEnvironment,
        epsilon: f64,
    ) -> Result<DecoherenceTime> {
        self.decoherence_time_on(env, epsilon, &self.default_search_grid()?)
    }

    pub fn decoherence_time_on(
        &self,
        env: &ProductEnvironment,
        epsilon: f64,
        search: &TimeGrid,
    ) -> Result<DecoherenceTime> {
        self.check_env(env)?;
        let factors = search
            .times()
            .iter()
            .map(|&t| self.decoherence_factor(env, t))
            .collect::<Result<Vec<_>>>()?;
        first_below(search, &factors, epsilon)
    }

    /// Uniform grid of [`DEFAULT_SEARCH_POINTS`] points on `[0, 4π/ḡ]`, ḡ the
    /// mean absolute coupling. The null model gets a unit horizon.
    pub fn default_search_grid(&self) -> Result<TimeGrid> {
        let gbar = self.mean_abs_coupling();
        let horizon = if gbar > 0.0 { 4.0 * PI / gbar } else { 1.0 };
        TimeGrid::linspace(horizon, DEFAULT_SEARCH_POINTS)
    }

    fn check_env(&self, env: &ProductEnvironment) -> Result<()> {
        if env.len() != self.num_env() {
            return Err(Error::DimensionMismatch {
                expected: self.num_env(),
                found: env.len(),
            });
        }
        Ok(())
    }

    fn check_register(&self, psi: &PureState) -> Result<()> {
        if psi.num_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                found: psi.num_qubits(),
            });
        }
        Ok(())
    }
}

fn branch(amps: &[Complex64]) -> Option<PureState> {
    let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    (weight > 0.0)
        .then(|| PureState::normalized(amps.to_vec()).ok())
        .flatten()
}

/// Search for the first grid point with `|factor| ≤ epsilon`, for callers that
/// obtain `r(t)` some other way (e.g. from branch overlaps of an entangled
/// environment).
pub fn first_below(
    grid: &TimeGrid,
    factors: &[Complex64],
    epsilon: f64,
) -> Result<DecoherenceTime> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let hit = grid
        .times()
        .iter()
        .zip(factors)
        .find(|(_, r)| r.norm() <= epsilon);
    Ok(match hit {
        Some((&t, r)) => DecoherenceTime {
            time: t,
            decohered: true,
            abs_factor: r.norm(),
        },
        None => DecoherenceTime {
            time: f64::INFINITY,
            decohered: false,
            abs_factor: factors.last().map_or(1.0, |r| r.norm()),
        },
    })
}

/// Precomputed diagonal of `H`; applying it costs one complex multiply per
/// amplitude.
#[derive(Debug, Clone)]
pub struct Propagator {
    num_qubits: usize,
    energies: Vec<f64>,
}

impl Propagator {
    pub fn apply(&self, psi: &PureState, t: f64) -> Result<PureState> {
        if psi.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: psi.num_qubits(),
            });
        }
        let amps = psi
            .amplitudes()
            .iter()
            .zip(&self.energies)
            .map(|(a, &e)| a * Complex64::from_polar(1.0, -e * t))
            .collect();
        Ok(PureState::from_unit_amplitudes(self.num_qubits, amps))
    }
}

/// Unentangled environment: spin `i` is `a_i|0⟩ + b_i|1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductEnvironment {
    spins: Vec<(Complex64, Complex64)>,
}

impl ProductEnvironment {
    pub fn new(spins: Vec<(Complex64, Complex64)>) -> Result<Self> {
        if spins.is_empty() {
            return Err(Error::InvalidArgument("empty environment".into()));
        }
        let spins = spins
            .into_iter()
            .map(|(a, b)| {
                let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                if !norm.is_finite() || (norm - 1.0).abs() > NORM_REJECT_TOL {
                    return Err(Error::BadNorm { norm });
                }
                Ok((a / norm, b / norm))
            })
            .collect::<Result<_>>()?;
        Ok(Self { spins })
    }

    /// Every spin in the same single-qubit state.
    pub fn uniform(num_env: usize, spin: &PureState) -> Result<Self> {
        if spin.num_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: spin.num_qubits(),
            });
        }
        let a = spin.amplitudes();
        Self::new(vec![(a[0], a[1]); num_env])
    }

    /// `|+x⟩^⊗N`.
    pub fn plus_x(num_env: usize) -> Result<Self> {
        Self::uniform(num_env, &PureState::from_bloch_angles(PI / 2.0, 0.0))
    }

    /// `|+z⟩^⊗N`.
    pub fn z_up(num_env: usize) -> Result<Self> {
        Self::uniform(num_env, &PureState::from_bloch_angles(0.0, 0.0))
    }

    pub fn spins(&self) -> &[(Complex64, Complex64)] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// Full environment state vector.
    pub fn to_state(&self) -> PureState {
        let first = PureState::from_unit_amplitudes(1, vec![self.spins[0].0, self.spins[0].1]);
        self.spins[1..].iter().fold(first, |acc, &(a, b)| {
            acc.tensor(&PureState::from_unit_amplitudes(1, vec![a, b]))
        })
    }
}

/// Strictly ascending, finite, non-negative sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidArgument("empty time grid".into()));
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::InvalidArgument(format!("invalid grid time {t}")));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "grid times must strictly ascend".into(),
            ));
        }
        Ok(Self { times })
    }

    /// `steps` evenly spaced points on `[0, t_max]`; a single step is `[0]`.
    pub fn linspace(t_max: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument(
                "time grid needs at least one step".into(),
            ));
        }
        if steps == 1 {
            return Self::new(vec![0.0]);
        }
        let dt = t_max / (steps - 1) as f64;
        Self::new((0..steps).map(|k| k as f64 * dt).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub bloch: BlochVector,
    pub purity: f64,
}

/// Result of a decoherence-time search. `time` is `+∞` when no grid point
/// reached the threshold, in which case `abs_factor` is `|r|` at the end of
/// the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceTime {
    pub time: f64,
    pub decohered: bool,
    pub abs_factor: f64,
}
