//! Batch experiment driver for `toomqca`: config resolution, seeded runs,
//! CSV output and run manifests.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod table;

pub use config::{ConfigFile, Experiment, RunConfig, ScheduleConfig, Seed};
pub use experiments::{execute, replay, ReplayReport, RunReport};
pub use manifest::RunManifest;
pub use table::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_ACCEPTANCE: i32 = 4;

/// Environment variable holding the worker-pool size.
pub const THREADS_ENV: &str = "TOOMQCA_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Invariant(_) => EXIT_INVARIANT,
            _ => EXIT_OTHER,
        }
    }
}

impl From<toomqca::Error> for CliError {
    fn from(e: toomqca::Error) -> Self {
        use toomqca::Error as E;
        match e {
            E::Invariant(m) => CliError::Invariant(m),
            E::Config(_)
            | E::OutOfBounds { .. }
            | E::UnsupportedGate(_)
            | E::UnsupportedGeometry(_)
            | E::Parse { .. }
            | E::Infeasible { .. } => CliError::Config(e.to_string()),
        }
    }
}

/// Sizes the global worker pool from [`THREADS_ENV`] when it is set.
pub fn init_thread_pool() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("{THREADS_ENV}={v} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Other(e.to_string()))
}
