//! Preset expansion and execution.

use std::f64::consts::{FRAC_PI_2, PI};

use qtraj::feedback::{self, FeedbackLaw};
use qtraj::homodyne::{self, HomodyneConfig};
use qtraj::trajectory::{run_ensemble, EnsembleStats};
use qtraj::{BlochVector, Mode, SimConfig};
use serde::{Deserialize, Serialize};

use crate::args::{parse_vector, Args, PresetName, Switch};
use crate::CliError;

pub const DEFAULT_ALPHA2: f64 = 1e4;
pub const DEFAULT_GAMMA_TAU: f64 = 1e-4;
pub const DEFAULT_GRID_POINTS: usize = 200;
pub const DEFAULT_SWEEP_DELAY: usize = 4;

/// Fully resolved run: everything needed to reproduce an output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub preset: PresetName,
    pub sim: SimConfig,
    pub grid_points: usize,
}

pub fn resolve(args: &Args) -> Result<RunSpec, CliError> {
    let preset = args.preset.unwrap_or(PresetName::Decay);
    let alpha2 = args.alpha2.unwrap_or(DEFAULT_ALPHA2);
    let gamma_tau = args.gamma_tau.unwrap_or(DEFAULT_GAMMA_TAU);
    let mode = args.mode.map(Mode::from).unwrap_or_default();
    let homodyne = HomodyneConfig::from_alpha2(alpha2, gamma_tau, mode)?;

    let theta_bar = args.theta_bar.unwrap_or(FRAC_PI_2);
    let enabled = match args.feedback {
        Some(Switch::On) => true,
        Some(Switch::Off) => false,
        None => matches!(preset, PresetName::Stabilize | PresetName::DelaySweep),
    };
    let law = FeedbackLaw::new(theta_bar, enabled)?;

    let initial = match &args.initial {
        Some(text) => {
            let [x, y, z] = parse_vector(text)?;
            let v = BlochVector::new(x, y, z);
            v.require_unit()?;
            v
        }
        None => law.target(),
    };

    let default_delay = if preset == PresetName::DelaySweep {
        DEFAULT_SWEEP_DELAY
    } else {
        1
    };
    let sim = SimConfig {
        steps: args.steps.unwrap_or(1000),
        trajectories: args.trajectories.unwrap_or(1000),
        master_seed: args.seed.unwrap_or(0),
        delay: args.delay.unwrap_or(default_delay),
        record_stride: args.record_stride.unwrap_or(10),
        allow_long_run: args.allow_long_run,
        ..SimConfig::new(homodyne, law, initial)
    };
    let spec = RunSpec {
        preset,
        sim,
        grid_points: args.grid_points.unwrap_or(DEFAULT_GRID_POINTS),
    };
    validate(&spec)?;
    Ok(spec)
}

pub fn validate(spec: &RunSpec) -> Result<(), CliError> {
    spec.sim.validate()?;
    if !spec.preset.is_field() && spec.sim.trajectories < 2 {
        return Err(CliError::Usage("ensembles need --trajectories ≥ 2".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub point: BlochVector,
    pub field: BlochVector,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Results {
    Field(Vec<FieldRow>),
    /// One ensemble per delay (a single entry unless sweeping).
    Ensembles(Vec<(usize, EnsembleStats)>),
}

/// The six axis poles followed by `n` points of a Fibonacci lattice.
pub fn sphere_grid(n: usize) -> Vec<BlochVector> {
    let mut grid = vec![
        BlochVector::new(1.0, 0.0, 0.0),
        BlochVector::new(-1.0, 0.0, 0.0),
        BlochVector::new(0.0, 1.0, 0.0),
        BlochVector::new(0.0, -1.0, 0.0),
        BlochVector::new(0.0, 0.0, 1.0),
        BlochVector::new(0.0, 0.0, -1.0),
    ];
    let golden_angle = PI * (3.0 - 5.0f64.sqrt());
    grid.extend((0..n).map(|i| {
        let z = 1.0 - (2 * i + 1) as f64 / n as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = golden_angle * i as f64;
        BlochVector::new(r * phi.cos(), r * phi.sin(), z)
    }));
    grid
}

pub fn execute(spec: &RunSpec) -> Result<Results, CliError> {
    validate(spec)?;
    let law = spec.sim.law;
    match spec.preset {
        PresetName::Fig1Field => Ok(Results::Field(
            sphere_grid(spec.grid_points)
                .into_iter()
                .map(|point| FieldRow {
                    point,
                    field: feedback::combined_field(&point, &law),
                })
                .collect(),
        )),
        PresetName::Fig2Field => Ok(Results::Field(
            sphere_grid(spec.grid_points)
                .into_iter()
                .map(|point| FieldRow {
                    point,
                    field: homodyne::nonlinear_field(&point),
                })
                .collect(),
        )),
        PresetName::Decay | PresetName::Stabilize => Ok(Results::Ensembles(vec![(
            spec.sim.delay,
            run_ensemble(&spec.sim)?,
        )])),
        PresetName::DelaySweep => {
            let runs = (1..=spec.sim.delay)
                .map(|delay| {
                    let cfg = SimConfig {
                        delay,
                        ..spec.sim.clone()
                    };
                    Ok((delay, run_ensemble(&cfg)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Results::Ensembles(runs))
        }
    }
}
