//! CSV and JSON emitters.
//!
//! CSV files start with a `# config: {...}` line holding the resolved
//! [`RunSpec`] as JSON, followed by a header row and LF-terminated records.
//! Floats are written with 17 significant digits. JSON files carry the same
//! rows plus the preset, seed and configuration.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::preset::{Results, RunSpec};
use crate::CliError;

const CONFIG_PREFIX: &str = "# config: ";

const ENSEMBLE_COLUMNS: [&str; 11] = [
    "step",
    "gamma_t",
    "mean_sx",
    "mean_sy",
    "mean_sz",
    "se_sx",
    "se_sy",
    "se_sz",
    "angle_var",
    "fidelity",
    "purity",
];

const FIELD_COLUMNS: [&str; 6] = ["grid_sx", "grid_sy", "grid_sz", "dsx", "dsy", "dsz"];

#[derive(Debug, Serialize)]
struct EnsembleRowOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    delay: Option<usize>,
    step: usize,
    gamma_t: f64,
    mean_sx: f64,
    mean_sy: f64,
    mean_sz: f64,
    se_sx: f64,
    se_sy: f64,
    se_sz: f64,
    angle_var: Option<f64>,
    fidelity: f64,
    purity: f64,
}

#[derive(Debug, Serialize)]
struct FieldRowOut {
    grid_sx: f64,
    grid_sy: f64,
    grid_sz: f64,
    dsx: f64,
    dsy: f64,
    dsz: f64,
}

#[derive(Serialize)]
struct JsonDocument<'a, R: Serialize> {
    preset: crate::args::PresetName,
    seed: u64,
    config: &'a RunSpec,
    rows: Vec<R>,
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn ensemble_rows(results: &[(usize, qtraj::EnsembleStats)], sweep: bool) -> Vec<EnsembleRowOut> {
    results
        .iter()
        .flat_map(|(delay, stats)| {
            stats.rows.iter().map(move |r| EnsembleRowOut {
                delay: sweep.then_some(*delay),
                step: r.step,
                gamma_t: r.gamma_t,
                mean_sx: r.mean.x,
                mean_sy: r.mean.y,
                mean_sz: r.mean.z,
                se_sx: r.std_err.x,
                se_sy: r.std_err.y,
                se_sz: r.std_err.z,
                angle_var: r.angle_var,
                fidelity: r.fidelity,
                purity: r.purity,
            })
        })
        .collect()
}

fn field_rows(rows: &[crate::preset::FieldRow]) -> Vec<FieldRowOut> {
    rows.iter()
        .map(|r| FieldRowOut {
            grid_sx: r.point.x,
            grid_sy: r.point.y,
            grid_sz: r.point.z,
            dsx: r.field.x,
            dsy: r.field.y,
            dsz: r.field.z,
        })
        .collect()
}

pub fn render(spec: &RunSpec, results: &Results, format: Format) -> Result<String, CliError> {
    let sweep = spec.preset == crate::args::PresetName::DelaySweep;
    match format {
        Format::Json => {
            let text = match results {
                Results::Field(rows) => serde_json::to_string_pretty(&JsonDocument {
                    preset: spec.preset,
                    seed: spec.sim.master_seed,
                    config: spec,
                    rows: field_rows(rows),
                }),
                Results::Ensembles(runs) => serde_json::to_string_pretty(&JsonDocument {
                    preset: spec.preset,
                    seed: spec.sim.master_seed,
                    config: spec,
                    rows: ensemble_rows(runs, sweep),
                }),
            }
            .map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(text + "\n")
        }
        Format::Csv => {
            let mut out = String::new();
            out.push_str(CONFIG_PREFIX);
            out.push_str(
                &serde_json::to_string(spec).map_err(|e| CliError::Internal(e.to_string()))?,
            );
            out.push('\n');
            let mut writer = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let write = |w: &mut csv::Writer<Vec<u8>>, rec: Vec<String>| {
                w.write_record(rec)
                    .map_err(|e| CliError::Internal(e.to_string()))
            };
            match results {
                Results::Field(rows) => {
                    write(
                        &mut writer,
                        FIELD_COLUMNS.iter().map(|c| c.to_string()).collect(),
                    )?;
                    for r in field_rows(rows) {
                        let vals = [r.grid_sx, r.grid_sy, r.grid_sz, r.dsx, r.dsy, r.dsz];
                        write(&mut writer, vals.iter().map(|&v| format_float(v)).collect())?;
                    }
                }
                Results::Ensembles(runs) => {
                    let mut header: Vec<String> = Vec::new();
                    if sweep {
                        header.push("delay".into());
                    }
                    header.extend(ENSEMBLE_COLUMNS.iter().map(|c| c.to_string()));
                    write(&mut writer, header)?;
                    for r in ensemble_rows(runs, sweep) {
                        let mut rec: Vec<String> = Vec::new();
                        if let Some(d) = r.delay {
                            rec.push(d.to_string());
                        }
                        rec.push(r.step.to_string());
                        rec.extend(
                            [
                                r.gamma_t,
                                r.mean_sx,
                                r.mean_sy,
                                r.mean_sz,
                                r.se_sx,
                                r.se_sy,
                                r.se_sz,
                                r.angle_var.unwrap_or(f64::NAN),
                                r.fidelity,
                                r.purity,
                            ]
                            .iter()
                            .map(|&v| format_float(v)),
                        );
                        write(&mut writer, rec)?;
                    }
                }
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| CliError::Internal(e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))?);
            Ok(out)
        }
    }
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Reads the [`RunSpec`] embedded in a previous CSV or JSON output.
pub fn load_embedded(path: &Path) -> Result<RunSpec, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let parsed = if let Some(rest) = text.strip_prefix(CONFIG_PREFIX) {
        let line = rest.lines().next().unwrap_or_default();
        serde_json::from_str::<RunSpec>(line)
    } else {
        serde_json::from_str::<serde_json::Value>(&text)
            .and_then(|mut doc| serde_json::from_value::<RunSpec>(doc["config"].take()))
    };
    parsed.map_err(|e| {
        CliError::Usage(format!(
            "{}: no usable embedded config ({e})",
            path.display()
        ))
    })
}
