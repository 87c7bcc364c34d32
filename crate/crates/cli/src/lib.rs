//! Parameter sweeps, CSV export and invariant validation for the
//! cavity-monitored double-well model.

pub mod config;
pub mod error;
pub mod sweep;
pub mod table;
pub mod validate;

pub use config::{Mode, SweepConfig};
pub use error::CliError;
pub use table::Table;
