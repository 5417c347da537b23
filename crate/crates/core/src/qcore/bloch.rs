use crate::error::{Error, Result};

/// Tolerance on `|r| ≤ 1`.
pub const BLOCH_NORM_TOL: f64 = 1e-9;

/// Bloch-sphere coordinates of a qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        if ![x, y, z].iter().all(|c| c.is_finite()) || v.norm() > 1.0 + BLOCH_NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "({x}, {y}, {z}) lies outside the Bloch ball"
            )));
        }
        Ok(v)
    }

    /// Components read off a valid density matrix; rounding can push them a
    /// hair past ±1.
    pub(crate) fn clamped(x: f64, y: f64, z: f64) -> Self {
        Self {
            x: x.clamp(-1.0, 1.0),
            y: y.clamp(-1.0, 1.0),
            z: z.clamp(-1.0, 1.0),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `x² + y²`, the squared distance from the z axis.
    pub fn transverse_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}
