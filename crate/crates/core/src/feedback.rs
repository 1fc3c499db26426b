//! Coherent feedback that cancels the measured diffusion at a target angle.
//!
//! After interval `k` the fluctuation part `Δn_qf` of the outcome sets the
//! amplitude of a coherent field `f = -(1 + cos θ̄) Δn_qf / (2|α|)` that acts
//! during a later interval. That field shifts the later outcome by
//! `δ = 2|α| f`, and only the fluctuation part is fed back again.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homodyne::{self, HomodyneConfig};
use crate::state::{BlochAngle, BlochVector, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackLaw {
    theta_bar: f64,
    enabled: bool,
}

impl FeedbackLaw {
    pub fn new(theta_bar: f64, enabled: bool) -> Result<Self> {
        BlochAngle::new(theta_bar)?;
        Ok(FeedbackLaw { theta_bar, enabled })
    }

    /// A disabled law; `theta_bar` still defines the reference state used for
    /// fidelities.
    pub fn disabled(theta_bar: f64) -> Result<Self> {
        Self::new(theta_bar, false)
    }

    pub fn theta_bar(&self) -> BlochAngle {
        BlochAngle::new(self.theta_bar).expect("validated on construction")
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    /// `(sin θ̄, 0, cos θ̄)`.
    pub fn target(&self) -> BlochVector {
        self.theta_bar().to_vector()
    }

    /// Weight of the Rabi part in the combined step. A disabled law behaves
    /// like `θ̄ = π`, where no feedback field is emitted.
    fn effective_cos(&self) -> f64 {
        if self.enabled {
            self.theta_bar().cos()
        } else {
            -1.0
        }
    }
}

/// Feedback field amplitude for a measured fluctuation `dn_qf`. Zero when
/// the law is disabled.
pub fn feedback_amplitude(dn_qf: f64, law: &FeedbackLaw, cfg: &HomodyneConfig) -> f64 {
    if !law.enabled {
        return 0.0;
    }
    let rabi = dn_qf / (2.0 * cfg.alpha_mag());
    -(rabi + law.theta_bar().cos() * rabi)
}

/// `dn/(2|α|) + f(dn)`, the part of the feedback that undoes the weak
/// measurement of `s_x`. Equals `-cos θ̄ · dn/(2|α|)`.
pub fn residual_rotation(dn: f64, law: &FeedbackLaw, cfg: &HomodyneConfig) -> f64 {
    let rabi = dn / (2.0 * cfg.alpha_mag());
    let residual = rabi + feedback_amplitude(dn, law, cfg);
    debug_assert!(
        !law.enabled
            || (residual + law.theta_bar().cos() * rabi).abs() <= 4.0 * f64::EPSILON * rabi.abs()
    );
    residual
}

/// Outcome shift `2|α| f(dn_qf)` produced for a later interval.
pub fn next_shift(dn_qf: f64, law: &FeedbackLaw, cfg: &HomodyneConfig) -> f64 {
    2.0 * cfg.alpha_mag() * feedback_amplitude(dn_qf, law, cfg)
}

/// Bloch increment of a fluctuation `dn` together with the feedback field
/// that compensates it:
///
/// ```text
/// δs = κ (-cos θ̄ s_z + 1 - s_x², -s_x s_y, cos θ̄ s_x - s_x s_z)
/// ```
///
/// Zero at the target `(sin θ̄, 0, cos θ̄)`, and `δs_z = 0` anywhere on the
/// circle `s_z = cos θ̄`.
pub fn combined_diffusion_step(
    s: &BlochVector,
    dn: f64,
    law: &FeedbackLaw,
    cfg: &HomodyneConfig,
) -> Result<BlochVector> {
    s.require_unit()?;
    Ok(homodyne::weighted_step(
        s,
        cfg.kappa(dn),
        law.effective_cos(),
    ))
}

/// [`combined_diffusion_step`] per unit `κ`, for any vector.
pub fn combined_field(s: &BlochVector, law: &FeedbackLaw) -> BlochVector {
    homodyne::weighted_step(s, 1.0, law.effective_cos())
}

/// First-order Bloch increment of a coherent field of real amplitude `f`
/// acting for one interval: `2 f √(Γτ) (s_z, 0, -s_x)`.
pub fn rabi_increment(s: &BlochVector, amplitude: f64, cfg: &HomodyneConfig) -> BlochVector {
    homodyne::linear_field(s) * (2.0 * amplitude * cfg.gamma_tau().sqrt())
}

/// Exact rotation of the atom about `s_y` by a coherent field of real
/// amplitude `f`, angle `2 f √(Γτ)`.
pub fn rabi_rotate(psi: &PureState, amplitude: f64, cfg: &HomodyneConfig) -> Result<PureState> {
    let half = amplitude * cfg.gamma_tau().sqrt();
    let (sin, cos) = half.sin_cos();
    let c_e = psi.c_e() * cos - psi.c_g() * sin;
    let c_g = psi.c_e() * sin + psi.c_g() * cos;
    PureState::new(c_e, c_g).map_err(|e| Error::Internal(format!("rotation lost the state: {e}")))
}

/// Delay line of pending outcome shifts. The front entry is the shift acting
/// in the current interval.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackState {
    pending: VecDeque<f64>,
}

impl FeedbackState {
    /// Empty pipeline of `delay` intervals (`delay ≥ 1`).
    pub fn new(delay: usize) -> Result<Self> {
        Self::preseeded(delay, 0.0)
    }

    /// Pipeline whose first `delay` intervals all carry `shift`.
    pub fn preseeded(delay: usize, shift: f64) -> Result<Self> {
        if delay == 0 {
            return Err(Error::InvalidArgument(
                "feedback delay must be at least 1".into(),
            ));
        }
        Ok(FeedbackState {
            pending: std::iter::repeat_n(shift, delay).collect(),
        })
    }

    pub fn delay(&self) -> usize {
        self.pending.len()
    }

    pub fn pending_shift(&self) -> f64 {
        self.pending.front().copied().unwrap_or(0.0)
    }

    /// Consumes the current shift and schedules `shift` `delay` intervals
    /// ahead. Returns the consumed shift.
    pub fn advance(&mut self, shift: f64) -> f64 {
        let current = self.pending.pop_front().unwrap_or(0.0);
        self.pending.push_back(shift);
        current
    }
}
