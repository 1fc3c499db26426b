use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use qtraj::Mode;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    /// Measurement step field (or the fluctuation-plus-feedback field when
    /// feedback is on) over a Bloch-sphere grid, per unit κ.
    Fig1Field,
    /// Nonlinear (weak-measurement) part of the step field, per unit κ.
    Fig2Field,
    /// Ensemble without feedback, compared against free decay.
    Decay,
    /// Ensemble with feedback started at the target state.
    Stabilize,
    /// `stabilize` repeated for every delay from 1 to `--delay`.
    DelaySweep,
}

impl PresetName {
    pub fn is_field(self) -> bool {
        matches!(self, PresetName::Fig1Field | PresetName::Fig2Field)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    FirstOrder,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::FirstOrder => Mode::FirstOrder,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Homodyne-monitored two-level atom with coherent feedback.
#[derive(Debug, Clone, Parser)]
#[command(name = "qtraj", version, about)]
pub struct Args {
    /// Experiment preset
    #[arg(long, value_enum)]
    pub preset: Option<PresetName>,
    /// Interval length in units of the excited-state lifetime (Γτ)
    #[arg(long)]
    pub gamma_tau: Option<f64>,
    /// Local-oscillator photons per interval (|α|²)
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// Target Bloch angle θ̄ in radians, within [0, π]
    #[arg(long)]
    pub theta_bar: Option<f64>,
    #[arg(long, value_enum)]
    pub feedback: Option<Switch>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// Feedback delay in intervals (maximum delay for delay-sweep)
    #[arg(long)]
    pub delay: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Initial Bloch vector "sx,sy,sz"
    #[arg(long, allow_hyphen_values = true)]
    pub initial: Option<String>,
    #[arg(long)]
    pub record_stride: Option<usize>,
    /// Quasi-uniform grid points for the field presets (the six poles are
    /// always added)
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Allow steps·Γτ > 1
    #[arg(long)]
    pub allow_long_run: bool,
    /// Output file; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for ensembles (0 = all cores). Does not affect output.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Re-run the configuration embedded in a previous CSV or JSON output
    #[arg(long, conflicts_with_all = [
        "preset", "gamma_tau", "alpha2", "theta_bar", "feedback", "mode", "steps",
        "trajectories", "delay", "seed", "initial", "record_stride", "grid_points",
        "allow_long_run",
    ])]
    pub config: Option<PathBuf>,
}

pub fn parse_vector(text: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "--initial expects three comma-separated numbers, got {text:?}"
        )));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .parse()
            .map_err(|_| CliError::Usage(format!("--initial: {part:?} is not a number")))?;
    }
    Ok(out)
}
