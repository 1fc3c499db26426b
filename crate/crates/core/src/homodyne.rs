//! One homodyne measurement interval.
//!
//! The local oscillator amplitude `α` is taken real and positive, so its
//! phase defines the measured quadrature and `Δn/α = Δn/|α|`. Every interval
//! is characterised by the dimensionless strength
//!
//! ```text
//! κ = √(Γτ) · Δn / |α|
//! ```
//!
//! which scales all first-order Bloch increments.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{BlochAngle, BlochVector, PureState};

/// How the atom is advanced over one interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Conditioned amplitude update followed by renormalization.
    #[default]
    Exact,
    /// First-order Bloch diffusion step followed by renormalization.
    FirstOrder,
}

/// Validation bounds for [`HomodyneConfig`]. The measurement model assumes a
/// strong local oscillator (`|α|² ≫ 1`) and short intervals (`Γτ ≪ 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub min_alpha2: f64,
    pub max_gamma_tau: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            min_alpha2: 100.0,
            max_gamma_tau: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneConfig {
    alpha_mag: f64,
    gamma_tau: f64,
    mode: Mode,
}

impl Default for HomodyneConfig {
    fn default() -> Self {
        HomodyneConfig {
            alpha_mag: 100.0,
            gamma_tau: 1e-4,
            mode: Mode::Exact,
        }
    }
}

impl HomodyneConfig {
    pub fn new(alpha_mag: f64, gamma_tau: f64, mode: Mode) -> Result<Self> {
        Self::with_limits(alpha_mag, gamma_tau, mode, Limits::default())
    }

    pub fn from_alpha2(alpha2: f64, gamma_tau: f64, mode: Mode) -> Result<Self> {
        if alpha2.is_nan() || alpha2 <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "|α|² must be positive, got {alpha2}"
            )));
        }
        Self::new(alpha2.sqrt(), gamma_tau, mode)
    }

    pub fn with_limits(alpha_mag: f64, gamma_tau: f64, mode: Mode, limits: Limits) -> Result<Self> {
        if !(alpha_mag > 0.0 && alpha_mag.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "|α| must be positive and finite, got {alpha_mag}"
            )));
        }
        if alpha_mag * alpha_mag < limits.min_alpha2 {
            return Err(Error::InvalidArgument(format!(
                "|α|² = {} is below the minimum {} (strong local oscillator required)",
                alpha_mag * alpha_mag,
                limits.min_alpha2
            )));
        }
        if !(gamma_tau > 0.0 && gamma_tau.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Γτ must be positive and finite, got {gamma_tau}"
            )));
        }
        if gamma_tau > limits.max_gamma_tau {
            return Err(Error::InvalidArgument(format!(
                "Γτ = {gamma_tau} exceeds the maximum {} (short intervals required)",
                limits.max_gamma_tau
            )));
        }
        Ok(HomodyneConfig {
            alpha_mag,
            gamma_tau,
            mode,
        })
    }

    pub fn alpha_mag(&self) -> f64 {
        self.alpha_mag
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha_mag * self.alpha_mag
    }

    pub fn gamma_tau(&self) -> f64 {
        self.gamma_tau
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Step strength `√(Γτ)·Δn/|α|`.
    pub fn kappa(&self, dn: f64) -> f64 {
        self.gamma_tau.sqrt() * dn / self.alpha_mag
    }
}

/// Outcome of one interval: `dn_total = dn_qf + shift`, where `shift` is the
/// known coherent displacement `2|α|f` applied by the feedback.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub dn_total: f64,
    pub dn_qf: f64,
    pub shift: f64,
}

impl MeasurementOutcome {
    pub fn new(dn_qf: f64, shift: f64) -> Self {
        MeasurementOutcome {
            dn_total: dn_qf + shift,
            dn_qf,
            shift,
        }
    }
}

/// Weak coherent field `|0⟩ + β|1⟩` entering during one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude {
    beta: Complex64,
}

impl CoherentAmplitude {
    pub fn new(beta: Complex64) -> Self {
        if beta.norm_sqr() > 0.1 {
            warn!(
                "coherent amplitude |β|² = {} is outside the weak-field regime",
                beta.norm_sqr()
            );
        }
        CoherentAmplitude { beta }
    }

    pub fn real(beta: f64) -> Self {
        Self::new(Complex64::new(beta, 0.0))
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

fn gaussian_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    (-d * d / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
}

/// Density of `Δn` when only vacuum fluctuations enter the detector.
pub fn vacuum_outcome_pdf(dn: f64, cfg: &HomodyneConfig) -> f64 {
    gaussian_pdf(dn, 0.0, cfg.alpha2())
}

/// Density of `Δn` for a weak coherent input: mean `α*β + β*α = 2|α| Re β`,
/// variance `|α|²`. The quadrature out of phase with the oscillator is
/// invisible.
pub fn coherent_outcome_pdf(dn: f64, beta: &CoherentAmplitude, cfg: &HomodyneConfig) -> f64 {
    gaussian_pdf(dn, 2.0 * cfg.alpha_mag() * beta.beta().re, cfg.alpha2())
}

/// Draws one outcome from the vacuum law displaced by `shift`.
pub fn sample_outcome<R: Rng + ?Sized>(
    shift: f64,
    cfg: &HomodyneConfig,
    rng: &mut R,
) -> MeasurementOutcome {
    sample_with_signal(0.0, shift, cfg, rng)
}

/// Mean photon-number difference produced by the atom's own in-phase dipole
/// field, `|α|·√(Γτ)·s_x`. It is `√(Γτ)` times smaller than the vacuum
/// spread, but its first moment carries the spontaneous-emission drift.
pub fn dipole_signal(s: &BlochVector, cfg: &HomodyneConfig) -> f64 {
    cfg.alpha_mag() * cfg.gamma_tau().sqrt() * s.x
}

/// Draws one outcome for an atom in state `s`: the fluctuation part follows
/// the Born probability of the conditioned update to first order in `Γτ`,
/// i.e. a Gaussian of variance `|α|²` centred on [`dipole_signal`].
pub fn sample_outcome_for_state<R: Rng + ?Sized>(
    s: &BlochVector,
    shift: f64,
    cfg: &HomodyneConfig,
    rng: &mut R,
) -> MeasurementOutcome {
    sample_with_signal(dipole_signal(s, cfg), shift, cfg, rng)
}

fn sample_with_signal<R: Rng + ?Sized>(
    signal: f64,
    shift: f64,
    cfg: &HomodyneConfig,
    rng: &mut R,
) -> MeasurementOutcome {
    let z: f64 = rng.sample(StandardNormal);
    MeasurementOutcome::new(signal + cfg.alpha_mag() * z, shift)
}

/// Atomic state conditioned on outcome `dn`:
///
/// ```text
/// c_E' = c_E (1 - Γτ/2)
/// c_G' = c_G + c_E √(Γτ) Δn/α
/// ```
///
/// renormalized and phase-fixed.
pub fn conditioned_update_exact(
    psi: &PureState,
    dn: f64,
    cfg: &HomodyneConfig,
) -> Result<PureState> {
    let c_e = psi.c_e() * (1.0 - cfg.gamma_tau() / 2.0);
    let c_g = psi.c_g() + psi.c_e() * cfg.kappa(dn);
    PureState::new(c_e, c_g)
        .map_err(|e| Error::Internal(format!("conditioned update lost the state: {e}")))
}

/// Change of the state orthogonal to `psi`, to first order in `√(Γτ)`:
/// `-κ c_E² (c_G* |E⟩ - c_E* |G⟩)`. Returned as `(δc_E, δc_G)`.
pub fn first_order_state_change(
    psi: &PureState,
    dn: f64,
    cfg: &HomodyneConfig,
) -> (Complex64, Complex64) {
    let k = -cfg.kappa(dn) * psi.c_e() * psi.c_e();
    (k * psi.c_g().conj(), -k * psi.c_e().conj())
}

/// Rabi-rotation direction about `s_y`, `(s_z, 0, -s_x)`. A coherent field of
/// amplitude `Δn/(2|α|)` moves the Bloch vector by `κ` times this.
pub fn linear_field(s: &BlochVector) -> BlochVector {
    BlochVector::new(s.z, 0.0, -s.x)
}

/// Measurement-induced part of the step per unit `κ`: `(1 - s_x², -s_x s_y,
/// -s_x s_z)`, with `1 - s_x²` written as `s_y² + s_z²` on the unit sphere.
/// Vanishes at the dipole eigenstates `s_x = ±1`.
pub fn nonlinear_field(s: &BlochVector) -> BlochVector {
    BlochVector::new(s.y * s.y + s.z * s.z, -s.x * s.y, -s.x * s.z)
}

/// Full first-order step per unit `κ`:
/// `(s_z + 1 - s_x², -s_x s_y, -s_x - s_x s_z)`.
pub fn diffusion_field(s: &BlochVector) -> BlochVector {
    linear_field(s) + nonlinear_field(s)
}

/// Increment for a Rabi part weighted by `-cos θ̄` plus the measurement part.
/// `cos θ̄ = -1` reproduces [`diffusion_step_first_order`] bit for bit.
pub(crate) fn weighted_step(s: &BlochVector, kappa: f64, cos_bar: f64) -> BlochVector {
    linear_field(s) * (-cos_bar) * kappa + nonlinear_field(s) * kappa
}

/// First-order Bloch increment conditioned on `dn`. The caller applies
/// `s ← normalize(s + δs)`.
pub fn diffusion_step_first_order(
    s: &BlochVector,
    dn: f64,
    cfg: &HomodyneConfig,
) -> Result<BlochVector> {
    s.require_unit()?;
    Ok(weighted_step(s, cfg.kappa(dn), -1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDecomposition {
    /// Rabi rotation about `s_y` by a coherent amplitude `Δn/(2|α|)`.
    pub linear: BlochVector,
    /// Weak-measurement pull towards the `s_x = sign(Δn)` pole.
    pub nonlinear: BlochVector,
}

pub fn decompose_step(s: &BlochVector, dn: f64, cfg: &HomodyneConfig) -> Result<StepDecomposition> {
    s.require_unit()?;
    let kappa = cfg.kappa(dn);
    Ok(StepDecomposition {
        linear: linear_field(s) * kappa,
        nonlinear: nonlinear_field(s) * kappa,
    })
}

/// Angle increment in the `s_x, s_z` plane: `κ (1 + cos θ)`.
pub fn delta_theta(theta: BlochAngle, dn: f64, cfg: &HomodyneConfig) -> f64 {
    cfg.kappa(dn) * (1.0 + theta.cos())
}
