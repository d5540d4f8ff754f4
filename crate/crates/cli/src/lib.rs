//! Configuration, experiment catalog and result encoding for the
//! `grouplab` command-line tool.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{parse_config, ExperimentConfig, Format, Settings};
pub use error::CliError;
pub use experiments::{find, run_experiment, Experiment, CATALOG};
pub use output::{comparison_table, emit, read_rows, ResultRow, RowVerdict, Value};
