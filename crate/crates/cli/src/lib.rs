//! Command-line front end: preset expansion, execution and result files.

pub mod args;
pub mod output;
pub mod preset;

use thiserror::Error;

pub use args::Args;
pub use preset::{execute, resolve, RunSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Invalid(#[from] qtraj::Error),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 1 for I/O and internal failures, 2 for usage and validation errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invalid(qtraj::Error::Internal(_)) => 1,
            CliError::Invalid(_) => 2,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }
}

/// Resolves, runs and writes one invocation.
pub fn run(args: &Args) -> Result<(), CliError> {
    let spec = match &args.config {
        Some(path) => {
            let spec = output::load_embedded(path)?;
            preset::validate(&spec)?;
            spec
        }
        None => resolve(args)?,
    };
    let results = with_threads(args.threads, || execute(&spec))?;
    let text = output::render(&spec, &results, args.format)?;
    output::emit(&text, args.out.as_deref())
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(
    threads: usize,
    job: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    if threads == 0 {
        return job();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?
        .install(job)
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T>(
    threads: usize,
    job: impl FnOnce() -> Result<T, CliError>,
) -> Result<T, CliError> {
    if threads > 1 {
        log::warn!("built without the `parallel` feature; --threads {threads} ignored");
    }
    job()
}
