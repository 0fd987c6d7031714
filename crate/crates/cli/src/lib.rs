//! Command-line front end: configuration ingestion, parameter sweeps,
//! built-in experiment presets, CSV emission, and a cross-validation report
//! that pits the analytic formulas, the exact chains, and the simulator
//! against each other.

pub mod config;
pub mod csvio;
pub mod presets;
pub mod sweep;
pub mod validate;

pub use config::{load_config, parse_config, SweepGrid, SweepPoint, SweepSpec};
pub use csvio::{csv_string, parse_csv, write_csv_file, CSV_HEADER};
pub use presets::{preset_rows, preset_specs, Preset, PresetOverrides};
pub use sweep::{run_sweep, Estimator, Metric, ResultRow, SweepOutput};
pub use validate::{render_report, run_validation, CheckContext, CheckResult};

/// Environment variable bounding parallelism (`0` or unset = automatic).
pub const THREADS_ENV: &str = "RLNC_LAB_THREADS";

/// Front-end failure classes, mapped onto process exit codes: configuration
/// and I/O problems exit 2, failed validation checks exit 1.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, arguments, or input files.
    Config(String),
    /// Runtime failure (I/O, or an engine error that should not occur for a
    /// validated configuration).
    Runtime(String),
    /// One or more validation checks failed.
    ValidationFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed { .. } => 1,
            CliError::Config(_) | CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(msg) => write!(f, "error: {msg}"),
            CliError::ValidationFailed { failed } => {
                write!(f, "{failed} validation check(s) failed")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<rlnc_lab::Error> for CliError {
    fn from(e: rlnc_lab::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Configures the global thread pool from [`THREADS_ENV`]. Call once at
/// startup, before any parallel work. `0` or unset leaves the automatic
/// thread count.
pub fn init_thread_pool_from_env() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a nonnegative integer, got '{raw}'")))?;
    if n == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("thread pool setup failed: {e}")))
}
