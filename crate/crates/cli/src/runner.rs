//! The three experiments and the report they leave behind.

use std::path::{Path, PathBuf};
use std::time::Instant;

use einsel_core::centralspin::{first_below, DecoherenceTime};
use einsel_core::kinematics::{
    persistence_experiment, sample_distances, DistanceStats, FixedEnvironment,
};
use einsel_core::qcore::BLOCH_NORM_TOL;
use serde::Serialize;

use crate::config::{EnvKind, ExperimentConfig, ExperimentKind};
use crate::error::{config_err, RunError};
use crate::output::{ensure_dir, write_atomic, Cell, Csv};

/// Slack, in standard errors, for comparing a Monte Carlo mean with the bound.
pub const BOUND_SIGMAS: f64 = 3.0;
/// Allowed drift of the mean distance away from its `t = 0` value, in standard errors.
pub const PERSISTENCE_SIGMAS: f64 = 5.0;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EvolveSummary {
    pub couplings: Vec<f64>,
    pub epsilon: f64,
    /// `None` when `|r|` never reaches `epsilon` on the search grid.
    pub t_d: Option<f64>,
    pub decohered: bool,
    pub final_abs_r: f64,
    /// Largest `|r(t)|` on the output grid at or after `t_d`.
    pub max_abs_r_after_td: Option<f64>,
    pub max_z_drift: f64,
    pub initial_bloch: [f64; 3],
    pub final_bloch: [f64; 3],
    pub initial_transverse_sq: f64,
    pub final_transverse_sq: f64,
    pub min_purity: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct KinematicsSummary {
    pub sample_count: usize,
    pub mean: f64,
    pub std_error: f64,
    pub max: f64,
    pub bound_value: f64,
    pub bound_satisfied: bool,
    pub mean_over_bound: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PersistenceSummary {
    pub sample_count: usize,
    pub bound_value: f64,
    /// Decoherence time that scaled the grid, when the config used `td_multiple`.
    pub reference_t_d: Option<f64>,
    pub t0_mean_distance: f64,
    pub max_mean_distance: f64,
    pub bound_satisfied_all_t: bool,
    pub max_abs_deviation_from_t0: f64,
    /// `max_t |mean(t) − mean(0)| / std_error(t)`; `None` when every standard
    /// error vanishes (a fixed environment).
    pub max_deviation_in_std_errors: Option<f64>,
    pub mean_stable_all_t: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Summary {
    Evolve(EvolveSummary),
    Kinematics(KinematicsSummary),
    Persistence(PersistenceSummary),
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub toolkit_version: &'static str,
    pub experiment: &'static str,
    pub config: serde_json::Value,
    pub wall_time_seconds: f64,
    #[serde(flatten)]
    pub summary: Summary,
    #[serde(skip)]
    pub files: Vec<PathBuf>,
}

/// Validates `config`, runs its experiment and writes the outputs under
/// `output_dir` (or the config's own directory).
pub fn run(config: &ExperimentConfig, output_dir: Option<&Path>) -> Result<RunReport, RunError> {
    let started = Instant::now();
    config.validate()?;
    let dir = output_dir.unwrap_or(&config.output_dir).to_path_buf();
    ensure_dir(&dir)?;
    let (summary, mut files) = match config.experiment {
        ExperimentKind::Evolve => run_evolve(config, &dir)?,
        ExperimentKind::Kinematics => run_kinematics(config, &dir)?,
        ExperimentKind::Persistence => run_persistence(config, &dir)?,
    };
    let report = RunReport {
        toolkit_version: TOOLKIT_VERSION,
        experiment: config.experiment.name(),
        config: config.canonical_json(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        summary,
        files: Vec::new(),
    };
    let summary_path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_atomic(&summary_path, json.as_bytes())?;
    files.push(summary_path);
    Ok(RunReport { files, ..report })
}

/// Central-spin Bloch trajectory: `trajectory.csv` plus the summary scalars.
pub fn run_evolve(
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<(Summary, Vec<PathBuf>), RunError> {
    let model = config.model()?;
    let (grid, _) = config.grid(&model)?;
    let central = config.central();
    let search = model.default_search_grid().map_err(config_err)?;

    let product = config.product_env()?;
    let env_state = match &product {
        Some(env) => env.to_state(),
        None => config.haar_sampler()?.sample_at(0),
    };
    // closed form for product environments, basis-sum overlap otherwise
    let factor = |t: f64| match &product {
        Some(env) => model.decoherence_factor(env, t),
        None => model.environment_overlap(&env_state, t),
    };
    let td: DecoherenceTime = {
        let rs = search
            .times()
            .iter()
            .map(|&t| factor(t))
            .collect::<Result<Vec<_>, _>>()?;
        first_below(&search, &rs, config.epsilon).map_err(config_err)?
    };

    let psi0 = model.initial_state(&central, &env_state)?;
    let traj = model.trajectory_of(&psi0, &grid)?;
    let rs = grid
        .times()
        .iter()
        .map(|&t| factor(t))
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = Csv::new(&[
        "t", "bloch_x", "bloch_y", "bloch_z", "purity", "re_r", "im_r", "abs_r",
    ]);
    for (p, r) in traj.iter().zip(&rs) {
        if p.bloch.norm() > 1.0 + BLOCH_NORM_TOL
            || p.purity > 1.0 + BLOCH_NORM_TOL
            || r.norm() > 1.0 + 1e-12
        {
            return Err(numerical(format!(
                "unphysical central state at t = {}",
                p.t
            )));
        }
        csv.row(&[
            Cell::Float(p.t),
            Cell::Float(p.bloch.x),
            Cell::Float(p.bloch.y),
            Cell::Float(p.bloch.z),
            Cell::Float(p.purity),
            Cell::Float(r.re),
            Cell::Float(r.im),
            Cell::Float(r.norm()),
        ]);
    }
    let first = traj.first().expect("grid is never empty");
    let last = traj.last().expect("grid is never empty");
    let max_abs_r_after_td = if td.decohered {
        grid.times()
            .iter()
            .zip(&rs)
            .filter(|(&t, _)| t >= td.time)
            .map(|(_, r)| r.norm())
            .reduce(f64::max)
    } else {
        None
    };
    let summary = EvolveSummary {
        couplings: model.couplings().to_vec(),
        epsilon: config.epsilon,
        t_d: td.decohered.then_some(td.time),
        decohered: td.decohered,
        final_abs_r: rs.last().expect("grid is never empty").norm(),
        max_abs_r_after_td,
        max_z_drift: traj
            .iter()
            .map(|p| (p.bloch.z - first.bloch.z).abs())
            .fold(0.0, f64::max),
        initial_bloch: [first.bloch.x, first.bloch.y, first.bloch.z],
        final_bloch: [last.bloch.x, last.bloch.y, last.bloch.z],
        initial_transverse_sq: first.bloch.transverse_sq(),
        final_transverse_sq: last.bloch.transverse_sq(),
        min_purity: traj.iter().map(|p| p.purity).fold(f64::INFINITY, f64::min),
    };
    let mut scalars = vec![
        summary.epsilon,
        summary.final_abs_r,
        summary.max_z_drift,
        summary.initial_transverse_sq,
        summary.final_transverse_sq,
        summary.min_purity,
    ];
    scalars.extend(summary.t_d);
    scalars.extend(summary.max_abs_r_after_td);
    scalars.extend(summary.initial_bloch);
    scalars.extend(summary.final_bloch);
    check_finite(&scalars)?;

    let path = dir.join("trajectory.csv");
    write_atomic(&path, csv.as_str().as_bytes())?;
    Ok((Summary::Evolve(summary), vec![path]))
}

/// Static subsystem distances: `distances.csv` plus the summary scalars.
pub fn run_kinematics(
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<(Summary, Vec<PathBuf>), RunError> {
    let split = config.env_split()?;
    let samples = config.samples()?;
    let distances = match config.env_spec.kind {
        EnvKind::Haar => sample_distances(&split, samples, &config.haar_sampler()?)?,
        _ => {
            let env = config.product_env()?.expect("product kind").to_state();
            sample_distances(&split, samples, &FixedEnvironment(env))?
        }
    };
    let stats = DistanceStats::from_samples(&distances, einsel_core::kinematics::bound(&split))?;
    let mut csv = Csv::new(&["sample_index", "trace_distance"]);
    for (i, d) in distances.iter().enumerate() {
        csv.row(&[Cell::Int(i as u64), Cell::Float(*d)]);
    }
    let summary = KinematicsSummary {
        sample_count: stats.sample_count,
        mean: stats.mean,
        std_error: stats.std_error,
        max: stats.max,
        bound_value: stats.bound_value,
        bound_satisfied: stats.within_bound(BOUND_SIGMAS),
        mean_over_bound: stats.mean / stats.bound_value,
    };
    check_finite(&[
        summary.mean,
        summary.std_error,
        summary.max,
        summary.bound_value,
        summary.mean_over_bound,
    ])?;
    let path = dir.join("distances.csv");
    write_atomic(&path, csv.as_str().as_bytes())?;
    Ok((Summary::Kinematics(summary), vec![path]))
}

/// Environment-subsystem distances along the decohering evolution:
/// `persistence.csv` plus the summary scalars.
pub fn run_persistence(
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<(Summary, Vec<PathBuf>), RunError> {
    let model = config.model()?;
    let (grid, reference_t_d) = config.grid(&model)?;
    let split = config.full_split()?;
    let samples = config.samples()?;
    let central = config.central();
    let rows = match config.env_spec.kind {
        EnvKind::Haar => persistence_experiment(
            &model,
            &split,
            samples,
            &grid,
            &config.haar_sampler()?,
            &central,
        )?,
        _ => {
            let env = FixedEnvironment(config.product_env()?.expect("product kind").to_state());
            persistence_experiment(&model, &split, samples, &grid, &env, &central)?
        }
    };
    let mut csv = Csv::new(&[
        "t",
        "mean_distance",
        "std_error",
        "max_distance",
        "bound_value",
    ]);
    for (t, s) in &rows {
        csv.row(&[
            Cell::Float(*t),
            Cell::Float(s.mean),
            Cell::Float(s.std_error),
            Cell::Float(s.max),
            Cell::Float(s.bound_value),
        ]);
    }
    let summary = summarize_persistence(&rows, reference_t_d);
    let mut scalars = vec![
        summary.bound_value,
        summary.t0_mean_distance,
        summary.max_mean_distance,
        summary.max_abs_deviation_from_t0,
    ];
    scalars.extend(summary.reference_t_d);
    scalars.extend(summary.max_deviation_in_std_errors);
    check_finite(&scalars)?;
    let path = dir.join("persistence.csv");
    write_atomic(&path, csv.as_str().as_bytes())?;
    Ok((Summary::Persistence(summary), vec![path]))
}

pub fn summarize_persistence(
    rows: &[(f64, DistanceStats)],
    reference_t_d: Option<f64>,
) -> PersistenceSummary {
    let t0 = rows[0].1;
    let deviations: Vec<(f64, f64)> = rows
        .iter()
        .map(|(_, s)| ((s.mean - t0.mean).abs(), s.std_error))
        .collect();
    let max_dev_se = deviations
        .iter()
        .filter(|(_, se)| *se > 0.0)
        .map(|(dev, se)| dev / se)
        .reduce(f64::max);
    PersistenceSummary {
        sample_count: t0.sample_count,
        bound_value: t0.bound_value,
        reference_t_d,
        t0_mean_distance: t0.mean,
        max_mean_distance: rows
            .iter()
            .map(|(_, s)| s.mean)
            .fold(f64::NEG_INFINITY, f64::max),
        bound_satisfied_all_t: rows.iter().all(|(_, s)| s.within_bound(BOUND_SIGMAS)),
        max_abs_deviation_from_t0: deviations.iter().map(|(d, _)| *d).fold(0.0, f64::max),
        max_deviation_in_std_errors: max_dev_se,
        mean_stable_all_t: deviations
            .iter()
            .all(|(dev, se)| *dev <= PERSISTENCE_SIGMAS * se + 1e-12),
    }
}

fn check_finite(values: &[f64]) -> Result<(), RunError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(numerical("non-finite summary scalar".into()))
    }
}

fn numerical(msg: String) -> RunError {
    RunError::Numerical(einsel_core::Error::InvalidArgument(msg))
}
