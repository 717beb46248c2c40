//! Library side of the `selfsim` command-line tool: run configuration,
//! dispatch to the analyses, and exit-code mapping.

pub mod config;
mod run;

pub use config::{Command, Format, RunConfig};
pub use run::{run, run_in_pool, Outcome};

use selfsim_core::growth::{plot_rows, GrowthTable};
use selfsim_core::walks::{walk_csv, WalkStats};

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_ASSERTION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] selfsim_core::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use selfsim_core::Error as E;
        match self {
            CliError::Config(_) => EXIT_PARSE,
            CliError::Core(E::Parse { .. } | E::UnknownLetter { .. } | E::InvalidInput(_)) => {
                EXIT_PARSE
            }
            CliError::Core(
                E::ResourceCap(_) | E::CapExceeded { .. } | E::NeedsLargerTable { .. },
            ) => EXIT_RESOURCE,
            CliError::Core(E::RelatorFailed(_)) => EXIT_ASSERTION,
            CliError::Core(E::MissingLength) | CliError::Io(_) | CliError::Pool(_) => EXIT_OTHER,
        }
    }
}

/// Input for [`emit_plot_data`].
pub enum PlotSource<'a> {
    Growth(&'a GrowthTable),
    Walk(&'a [WalkStats]),
}

/// Columnar CSV for external plotting: `n, gamma, log_gamma, log_log_gamma`
/// for growth tables and `n, P, H, L` for walk statistics.
pub fn emit_plot_data(source: PlotSource<'_>) -> String {
    match source {
        PlotSource::Growth(table) => plot_rows(table),
        PlotSource::Walk(stats) => walk_csv(stats),
    }
}
