//! Experiment configuration (TOML) and its translation into model inputs.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use einsel_core::centralspin::{CentralSpinModel, ProductEnvironment, TimeGrid, DEFAULT_EPSILON};
use einsel_core::kinematics::{HaarSampler, SubsystemSplit};
use einsel_core::qcore::PureState;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, RunError};

/// Largest environment accepted; the dense register has `2^(N+1)` amplitudes.
pub const MAX_NUM_ENV: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Evolve,
    Kinematics,
    Persistence,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::Kinematics => "kinematics",
            ExperimentKind::Persistence => "persistence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingDistribution {
    Uniform,
}

/// Either an explicit coupling list or a seeded draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Couplings {
    Explicit(Vec<f64>),
    Random {
        distribution: CouplingDistribution,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

impl Default for BlochAngles {
    /// `|+x⟩`.
    fn default() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Haar,
    PlusXProduct,
    ZProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    pub kind: EnvKind,
    pub seed: u64,
}

/// `steps` grid points on `[0, t_max]`, where `t_max` is either explicit or a
/// multiple of the decoherence time of the model under a `|+x⟩` product
/// environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub td_multiple: Option<f64>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub num_env: usize,
    pub couplings: Couplings,
    #[serde(default)]
    pub central_state: BlochAngles,
    pub env_spec: EnvSpec,
    /// Register positions: the central spin is qubit 0, environment spins are
    /// 1..=num_env.
    #[serde(default = "default_subsystem")]
    pub subsystem_qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub output_dir: PathBuf,
}

fn default_subsystem() -> Vec<usize> {
    vec![1]
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Replaces every seed in the config.
    pub fn override_seed(&mut self, seed: u64) {
        if let Couplings::Random { seed: s, .. } = &mut self.couplings {
            *s = seed;
        }
        self.env_spec.seed = seed;
    }

    /// Sorted-key JSON of the parsed config, defaults filled in. Two configs
    /// that parse to the same value have the same canonical text.
    pub fn canonical_json(&self) -> serde_json::Value {
        // serde_json's default map is ordered by key
        serde_json::to_value(self).expect("config is always representable as JSON")
    }

    /// Checks everything the selected experiment needs.
    pub fn validate(&self) -> Result<(), RunError> {
        let model = self.model()?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(RunError::Config(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        let angles = [self.central_state.theta, self.central_state.phi];
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(RunError::Config(
                "central_state angles must be finite".into(),
            ));
        }
        match self.experiment {
            ExperimentKind::Evolve => {
                self.grid(&model)?;
            }
            ExperimentKind::Kinematics => {
                self.samples()?;
                self.env_split()?;
            }
            ExperimentKind::Persistence => {
                self.samples()?;
                self.full_split()?;
                self.grid(&model)?;
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<CentralSpinModel, RunError> {
        if self.num_env == 0 || self.num_env > MAX_NUM_ENV {
            return Err(RunError::Config(format!(
                "num_env must lie in 1..={MAX_NUM_ENV}, got {}",
                self.num_env
            )));
        }
        match &self.couplings {
            Couplings::Explicit(g) => {
                if g.len() != self.num_env {
                    return Err(RunError::Config(format!(
                        "{} couplings given for {} environment spins",
                        g.len(),
                        self.num_env
                    )));
                }
                CentralSpinModel::new(g.clone()).map_err(config_err)
            }
            Couplings::Random {
                distribution: CouplingDistribution::Uniform,
                seed,
            } => CentralSpinModel::uniform(self.num_env, *seed).map_err(config_err),
        }
    }

    pub fn central(&self) -> PureState {
        PureState::from_bloch_angles(self.central_state.theta, self.central_state.phi)
    }

    /// Product environment, if the spec names one.
    pub fn product_env(&self) -> Result<Option<ProductEnvironment>, RunError> {
        match self.env_spec.kind {
            EnvKind::Haar => Ok(None),
            EnvKind::PlusXProduct => ProductEnvironment::plus_x(self.num_env)
                .map(Some)
                .map_err(config_err),
            EnvKind::ZProduct => ProductEnvironment::z_up(self.num_env)
                .map(Some)
                .map_err(config_err),
        }
    }

    pub fn haar_sampler(&self) -> Result<HaarSampler, RunError> {
        HaarSampler::new(self.num_env, self.env_spec.seed).map_err(config_err)
    }

    pub fn samples(&self) -> Result<usize, RunError> {
        match self.samples {
            Some(s) if s >= 2 => Ok(s),
            Some(s) => Err(RunError::Config(format!(
                "samples must be at least 2, got {s}"
            ))),
            None => Err(RunError::Config(format!(
                "experiment {} needs samples",
                self.experiment.name()
            ))),
        }
    }

    /// Subsystem on the full `num_env + 1` register; must avoid the central spin.
    pub fn full_split(&self) -> Result<SubsystemSplit, RunError> {
        if self.subsystem_qubits.contains(&0) {
            return Err(RunError::Config(
                "subsystem_qubits may not include the central spin (qubit 0)".into(),
            ));
        }
        let split =
            SubsystemSplit::from_indices(self.subsystem_qubits.iter().copied(), self.num_env + 1)
                .map_err(config_err)?;
        if split.subsystem().len() >= self.num_env {
            return Err(RunError::Config(
                "subsystem must leave at least one environment spin out".into(),
            ));
        }
        Ok(split)
    }

    /// The same subsystem on the environment register alone (indices shifted down by one).
    pub fn env_split(&self) -> Result<SubsystemSplit, RunError> {
        let full = self.full_split()?;
        SubsystemSplit::from_indices(
            full.subsystem().indices().iter().map(|q| q - 1),
            self.num_env,
        )
        .map_err(config_err)
    }

    /// Time grid plus the reference decoherence time when `td_multiple` was used.
    pub fn grid(&self, model: &CentralSpinModel) -> Result<(TimeGrid, Option<f64>), RunError> {
        let spec = self.time.ok_or_else(|| {
            RunError::Config(format!("experiment {} needs time", self.experiment.name()))
        })?;
        if spec.steps == 0 {
            return Err(RunError::Config("time.steps must be at least 1".into()));
        }
        let (t_max, td) = match (spec.t_max, spec.td_multiple) {
            (Some(t), None) => (t, None),
            (None, Some(m)) => {
                if !(m.is_finite() && m >= 0.0) {
                    return Err(RunError::Config(format!(
                        "time.td_multiple must be >= 0, got {m}"
                    )));
                }
                let env = ProductEnvironment::plus_x(self.num_env).map_err(config_err)?;
                let td = model
                    .decoherence_time(&env, self.epsilon)
                    .map_err(config_err)?;
                if !td.decohered {
                    return Err(RunError::Config(
                        "time.td_multiple needs a model that decoheres a |+x> product environment"
                            .into(),
                    ));
                }
                (m * td.time, Some(td.time))
            }
            _ => {
                return Err(RunError::Config(
                    "time needs exactly one of t_max and td_multiple".into(),
                ))
            }
        };
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(RunError::Config(format!(
                "time.t_max must be >= 0, got {t_max}"
            )));
        }
        if spec.steps > 1 && t_max == 0.0 {
            return Err(RunError::Config("several time steps need t_max > 0".into()));
        }
        let grid = TimeGrid::linspace(t_max, spec.steps).map_err(config_err)?;
        Ok((grid, td))
    }
}
