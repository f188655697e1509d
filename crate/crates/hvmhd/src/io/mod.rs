//! Configuration files, diagnostics tables and checkpoints.

pub mod checkpoint;
pub mod config;
pub mod csv;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CheckpointError};
pub use config::{parse_config, ConfigError, FourierMode, ModeProfile, RunConfig, TimeStep};
pub use csv::{read_diagnostics_csv, write_diagnostics_csv, DiagnosticsCsv, CSV_COLUMNS};
