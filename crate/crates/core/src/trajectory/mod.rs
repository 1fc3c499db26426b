//! Multi-interval trajectories and seeded ensembles.
//!
//! Each interval of a trajectory:
//!
//! 1. draws the outcome `dn_total = dn_qf + shift`, where `shift` is the
//!    feedback displacement scheduled `delay` intervals earlier and `dn_qf`
//!    follows the state-dependent outcome law;
//! 2. advances the atom. In [`Mode::Exact`] the amplitudes are conditioned on
//!    `dn_qf` and then rotated by the coherent feedback field
//!    `f = shift/(2|α|)`. In [`Mode::FirstOrder`] the Bloch vector takes the
//!    combined fluctuation-plus-feedback step for `dn_qf`, i.e. the
//!    delay-free compensated dynamics;
//! 3. schedules `2|α| f(dn_qf)` for a later interval. Only the fluctuation
//!    part is fed back.
//!
//! Trajectory `i` of a run with master seed `m` draws from a ChaCha8 stream
//! keyed by `seed_from_u64(m)` with stream id `i`, so any trajectory can be
//! regenerated on its own and streams never overlap.

mod ensemble;
mod oracle;

pub use ensemble::{
    angle_variance, run_ensemble, run_ensemble_with, EnsembleStats, Execution, StatsRow,
};
pub use oracle::{master_evolve, DensityMatrix2};

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feedback::{self, FeedbackLaw, FeedbackState};
use crate::homodyne::{self, HomodyneConfig, Limits, MeasurementOutcome, Mode};
use crate::state::{state_from_bloch, BlochVector, PureState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub homodyne: HomodyneConfig,
    pub law: FeedbackLaw,
    pub initial: BlochVector,
    pub steps: usize,
    pub trajectories: usize,
    pub master_seed: u64,
    pub delay: usize,
    pub record_stride: usize,
    /// Permits `steps·Γτ > 1`, beyond the short-time regime.
    #[serde(default)]
    pub allow_long_run: bool,
    #[serde(default)]
    pub limits: Limits,
}

impl SimConfig {
    pub fn new(homodyne: HomodyneConfig, law: FeedbackLaw, initial: BlochVector) -> Self {
        SimConfig {
            homodyne,
            law,
            initial,
            steps: 1000,
            trajectories: 1000,
            master_seed: 0,
            delay: 1,
            record_stride: 10,
            allow_long_run: false,
            limits: Limits::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        HomodyneConfig::with_limits(
            self.homodyne.alpha_mag(),
            self.homodyne.gamma_tau(),
            self.homodyne.mode(),
            self.limits,
        )?;
        FeedbackLaw::new(self.law.theta_bar().theta(), self.law.enabled())?;
        self.initial.require_unit()?;
        if self.trajectories == 0 {
            return Err(Error::InvalidArgument(
                "trajectories must be positive".into(),
            ));
        }
        if self.delay == 0 {
            return Err(Error::InvalidArgument(
                "feedback delay must be at least 1".into(),
            ));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidArgument(
                "record stride must be positive".into(),
            ));
        }
        let span = self.total_gamma_t();
        if span > 1.0 {
            if !self.allow_long_run {
                return Err(Error::InvalidArgument(format!(
                    "steps·Γτ = {span} exceeds 1 (short-time regime); allow long runs explicitly"
                )));
            }
            warn!("steps·Γτ = {span} exceeds 1; higher-order effects are not modelled");
        }
        Ok(())
    }

    pub fn total_gamma_t(&self) -> f64 {
        self.steps as f64 * self.homodyne.gamma_tau()
    }

    /// Step indices that are recorded: every `record_stride`-th step from 0,
    /// plus the final step.
    pub fn recorded_steps(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..=self.steps).step_by(self.record_stride).collect();
        if out.last() != Some(&self.steps) {
            out.push(self.steps);
        }
        out
    }

    pub(crate) fn is_recorded(&self, step: usize) -> bool {
        step.is_multiple_of(self.record_stride) || step == self.steps
    }
}

/// Per-trajectory atomic state. Exact mode carries amplitudes, first-order
/// mode carries the Bloch vector directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomState {
    Amplitudes(PureState),
    Bloch(BlochVector),
}

impl AtomState {
    pub fn initial(cfg: &SimConfig) -> Result<Self> {
        cfg.initial.require_unit()?;
        Ok(match cfg.homodyne.mode() {
            Mode::Exact => AtomState::Amplitudes(state_from_bloch(&cfg.initial)?),
            Mode::FirstOrder => AtomState::Bloch(cfg.initial),
        })
    }

    pub fn bloch(&self) -> BlochVector {
        match self {
            AtomState::Amplitudes(psi) => psi.bloch(),
            AtomState::Bloch(s) => *s,
        }
    }

    pub fn pure_state(&self) -> Result<PureState> {
        match self {
            AtomState::Amplitudes(psi) => Ok(*psi),
            AtomState::Bloch(s) => state_from_bloch(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub bloch: BlochVector,
    pub dn_total: f64,
    pub dn_qf: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub index: u64,
    pub records: Vec<StepRecord>,
    pub final_state: PureState,
}

pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Advances one interval. `fb` is updated in place with the shift produced
/// by this interval's fluctuation.
pub fn step_trajectory<R: Rng + ?Sized>(
    atom: &AtomState,
    fb: &mut FeedbackState,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<(AtomState, MeasurementOutcome)> {
    let h = &cfg.homodyne;
    let s = atom.bloch();
    let outcome = homodyne::sample_outcome_for_state(&s, fb.pending_shift(), h, rng);
    let next = match atom {
        AtomState::Amplitudes(psi) => {
            let mut psi = homodyne::conditioned_update_exact(psi, outcome.dn_qf, h)?;
            if outcome.shift != 0.0 {
                let amplitude = outcome.shift / (2.0 * h.alpha_mag());
                psi = feedback::rabi_rotate(&psi, amplitude, h)?;
            }
            AtomState::Amplitudes(psi)
        }
        AtomState::Bloch(s) => {
            let ds = feedback::combined_diffusion_step(s, outcome.dn_qf, &cfg.law, h)?;
            if ds.is_zero() {
                AtomState::Bloch(*s)
            } else {
                AtomState::Bloch((*s + ds).normalized()?)
            }
        }
    };
    fb.advance(feedback::next_shift(outcome.dn_qf, &cfg.law, h));
    Ok((next, outcome))
}

/// Runs trajectory `index` and hands every recorded step to `visit`.
/// Returns the final atomic state.
pub(crate) fn simulate<F>(cfg: &SimConfig, index: u64, mut visit: F) -> Result<AtomState>
where
    F: FnMut(usize, &AtomState, &MeasurementOutcome),
{
    let mut rng = trajectory_rng(cfg.master_seed, index);
    let mut fb = FeedbackState::new(cfg.delay)?;
    let mut atom = AtomState::initial(cfg)?;
    visit(0, &atom, &MeasurementOutcome::default());
    for step in 1..=cfg.steps {
        let (next, outcome) = step_trajectory(&atom, &mut fb, cfg, &mut rng)?;
        atom = next;
        if cfg.is_recorded(step) {
            visit(step, &atom, &outcome);
        }
    }
    Ok(atom)
}

pub fn run_trajectory(cfg: &SimConfig, index: u64) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let mut records = Vec::with_capacity(cfg.steps / cfg.record_stride + 2);
    let atom = simulate(cfg, index, |step, atom, o| {
        records.push(StepRecord {
            step,
            bloch: atom.bloch(),
            dn_total: o.dn_total,
            dn_qf: o.dn_qf,
            shift: o.shift,
        })
    })?;
    Ok(TrajectoryRecord {
        index,
        records,
        final_state: atom.pure_state()?,
    })
}
