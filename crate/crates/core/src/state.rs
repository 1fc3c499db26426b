//! Two-level atom states.
//!
//! A [`PureState`] holds the interaction-picture amplitudes `(c_E, c_G)` of
//! the excited and ground state. A [`BlochVector`] holds the real triple
//!
//! ```text
//! s_x = 2 Re(c_E* c_G)     in-phase dipole
//! s_y = 2 Im(c_E* c_G)     out-of-phase dipole
//! s_z = |c_E|² - |c_G|²    inversion
//! ```
//!
//! These two conversions are the only place the sign conventions live; all
//! other modules go through them.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|s| = 1` accepted by operations that need a pure-state
/// Bloch vector.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Normalized amplitudes of the excited and ground state.
///
/// The global phase is fixed so that `c_E` is real and non-negative, or, when
/// `c_E = 0`, so that `c_G` is real and non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    c_e: Complex64,
    c_g: Complex64,
}

impl PureState {
    pub const GROUND: PureState = PureState {
        c_e: Complex64::new(0.0, 0.0),
        c_g: Complex64::new(1.0, 0.0),
    };

    pub const EXCITED: PureState = PureState {
        c_e: Complex64::new(1.0, 0.0),
        c_g: Complex64::new(0.0, 0.0),
    };

    /// Builds a state from arbitrary (non-zero) amplitudes, normalizing and
    /// fixing the global phase.
    pub fn new(c_e: Complex64, c_g: Complex64) -> Result<Self> {
        let norm_sqr = c_e.norm_sqr() + c_g.norm_sqr();
        if !norm_sqr.is_finite() || norm_sqr == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "amplitudes ({c_e}, {c_g}) cannot be normalized"
            )));
        }
        let inv = norm_sqr.sqrt().recip();
        Ok(Self::phase_fixed(c_e * inv, c_g * inv))
    }

    pub fn from_real(c_e: f64, c_g: f64) -> Result<Self> {
        Self::new(Complex64::new(c_e, 0.0), Complex64::new(c_g, 0.0))
    }

    fn phase_fixed(c_e: Complex64, c_g: Complex64) -> Self {
        let mag_e = c_e.norm();
        if mag_e > 0.0 {
            let phase = c_e.conj() / mag_e;
            PureState {
                c_e: Complex64::new(mag_e, 0.0),
                c_g: c_g * phase,
            }
        } else {
            PureState {
                c_e: Complex64::new(0.0, 0.0),
                c_g: Complex64::new(c_g.norm(), 0.0),
            }
        }
    }

    pub fn c_e(&self) -> Complex64 {
        self.c_e
    }

    pub fn c_g(&self) -> Complex64 {
        self.c_g
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_e.norm_sqr() + self.c_g.norm_sqr()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        (self.c_e.conj() * other.c_e + self.c_g.conj() * other.c_g).norm_sqr()
    }

    pub fn bloch(&self) -> BlochVector {
        bloch_from_state(self)
    }
}

/// Real Bloch triple `(s_x, s_y, s_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector::new(0.0, 0.0, 0.0);
    pub const GROUND: BlochVector = BlochVector::new(0.0, 0.0, -1.0);
    pub const EXCITED: BlochVector = BlochVector::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    pub fn normalized(&self) -> Result<BlochVector> {
        let n = self.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize Bloch vector {self:?}"
            )));
        }
        Ok(*self * n.recip())
    }

    /// Errors unless `|s| = 1` within [`UNIT_TOLERANCE`].
    pub fn require_unit(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > UNIT_TOLERANCE || !n.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Bloch vector ({}, {}, {}) has norm {n}, expected 1",
                self.x, self.y, self.z
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &BlochVector) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for BlochVector {
    type Output = BlochVector;
    fn add(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        BlochVector::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for BlochVector {
    type Output = BlochVector;
    fn mul(self, k: f64) -> BlochVector {
        BlochVector::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Polar angle in the `s_x, s_z` half plane with `s_x ≥ 0`:
/// `cos θ = s_z`, `sin θ = s_x`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BlochAngle(f64);

impl BlochAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("angle {theta} outside [0, π]")));
        }
        Ok(BlochAngle(theta))
    }

    pub fn theta(self) -> f64 {
        self.0
    }

    /// The unit vector `(sin θ, 0, cos θ)`.
    /// `cos θ`. Every use of the target angle goes through here so that the
    /// target vector and the feedback law agree to the last bit; an inlined
    /// `cos` next to a `sin` may be fused into `sincos`, which rounds
    /// differently.
    #[inline(never)]
    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    #[inline(never)]
    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn to_vector(self) -> BlochVector {
        BlochVector::new(self.sin(), 0.0, self.cos())
    }
}

pub fn bloch_from_state(psi: &PureState) -> BlochVector {
    let coherence = psi.c_e.conj() * psi.c_g;
    BlochVector::new(
        2.0 * coherence.re,
        2.0 * coherence.im,
        psi.c_e.norm_sqr() - psi.c_g.norm_sqr(),
    )
}

pub fn state_from_bloch(s: &BlochVector) -> Result<PureState> {
    s.require_unit()?;
    let s = s.normalized()?;
    let z = s.z.clamp(-1.0, 1.0);
    let transverse = Complex64::new(s.x, s.y);
    // The larger amplitude comes from 1 ± z; the smaller one from
    // |c_E||c_G| = |s_⊥|/2, which keeps precision near the poles.
    let (mag_e, c_g) = if z >= 0.0 {
        let mag_e = ((1.0 + z) / 2.0).sqrt();
        (mag_e, transverse / (2.0 * mag_e))
    } else {
        let mag_g = ((1.0 - z) / 2.0).sqrt();
        let t = transverse.norm();
        if t > 0.0 {
            (t / (2.0 * mag_g), transverse * (mag_g / t))
        } else {
            (0.0, Complex64::new(mag_g, 0.0))
        }
    };
    PureState::new(Complex64::new(mag_e, 0.0), c_g)
}

/// Angle of a vector lying in the `s_y = 0`, `s_x ≥ 0` half plane.
pub fn angle_of(s: &BlochVector) -> Result<BlochAngle> {
    if s.y.abs() > UNIT_TOLERANCE || s.x < -UNIT_TOLERANCE {
        return Err(Error::Domain(format!(
            "angle form needs s_y = 0 and s_x ≥ 0, got ({}, {}, {})",
            s.x, s.y, s.z
        )));
    }
    BlochAngle::new(s.x.atan2(s.z).clamp(0.0, PI))
}
