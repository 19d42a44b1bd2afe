//! Experiment harness: condition-number tables, iteration-count tables,
//! spectra and convergence histories as CSV or markdown.

pub mod experiments;
pub mod request;
pub mod table;

pub use experiments::Outcome;
pub use request::{Command, ExperimentRequest, Format, UsageError};
pub use table::Table;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const NOT_CONVERGED: u8 = 2;
    pub const RESOURCE_CAP: u8 = 3;
}
