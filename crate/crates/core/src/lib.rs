//! Simulation kernels for einselection in the central-spin model and for the
//! typicality of Haar-random environment subsystems.

pub mod centralspin;
pub mod error;
pub mod kinematics;
pub mod qcore;

pub use error::{Error, Result};
