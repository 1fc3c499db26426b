//! Quantum trajectories of a single two-level atom whose emitted field is
//! monitored by time-resolved balanced homodyne detection, together with a
//! delayed coherent feedback field that undoes the measured diffusion.
//!
//! The crate is split into four layers:
//!
//! * [`state`]: amplitude and Bloch-vector representations of the atom.
//! * [`homodyne`]: one measurement interval (outcome laws, sampling,
//!   conditioned updates, first-order Bloch diffusion).
//! * [`feedback`]: the compensating feedback law and the combined
//!   fluctuation-plus-feedback step.
//! * [`trajectory`]: multi-interval integration, seeded ensembles, statistics
//!   and the closed-form amplitude-damping oracle.
//!
//! Time is dimensionless throughout: one interval is `Γτ`, a run of `n`
//! intervals spans `Γt = n·Γτ`.

pub mod error;
pub mod feedback;
pub mod homodyne;
pub mod state;
pub mod trajectory;

pub use error::{Error, Result};
pub use feedback::{FeedbackLaw, FeedbackState};
pub use homodyne::{CoherentAmplitude, HomodyneConfig, Limits, MeasurementOutcome, Mode};
pub use state::{BlochAngle, BlochVector, PureState};
pub use trajectory::{
    DensityMatrix2, EnsembleStats, Execution, SimConfig, StatsRow, StepRecord, TrajectoryRecord,
};
