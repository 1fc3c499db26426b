//! Closed-form unconditional evolution (amplitude damping) used as the
//! reference for ensemble averages.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::BlochVector;

/// Mixed two-level state given by its Bloch vector, `|u| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix2 {
    u: BlochVector,
}

impl DensityMatrix2 {
    pub fn new(u: BlochVector) -> Result<Self> {
        let r2 = u.norm_sqr();
        if r2.is_nan() || r2 > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "Bloch vector {u:?} lies outside the unit ball"
            )));
        }
        Ok(DensityMatrix2 { u })
    }

    pub fn bloch(&self) -> BlochVector {
        self.u
    }

    /// `tr ρ² = (1 + |u|²)/2`.
    pub fn purity(&self) -> f64 {
        (1.0 + self.u.norm_sqr()) / 2.0
    }
}

/// Amplitude damping over a dimensionless time `Γt`: coherences decay at
/// `Γ/2`, the inversion relaxes to the ground state at `Γ`.
pub fn master_evolve(u0: &DensityMatrix2, gamma_t: f64) -> Result<DensityMatrix2> {
    if gamma_t.is_nan() || gamma_t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Γt must be non-negative, got {gamma_t}"
        )));
    }
    let coherence = (-gamma_t / 2.0).exp();
    let population = (-gamma_t).exp();
    let u = u0.u;
    Ok(DensityMatrix2 {
        u: BlochVector::new(
            u.x * coherence,
            u.y * coherence,
            -1.0 + (u.z + 1.0) * population,
        ),
    })
}
