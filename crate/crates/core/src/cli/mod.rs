//! Config-driven command-line front end: TOML in, CSV plus a JSON manifest
//! out.

mod config;
mod output;
mod run;

pub use config::{
    equivalent, parse_config, parse_config_with, to_config_text, Command, ConvergenceConfig, DynamicsConfig,
    OutputConfig, ProtocolConfig, RunConfig, SweepConfig, SwitchTime,
};
pub use output::{format_number, run_hash, CsvTable, FileRecord, Manifest, TOOL_NAME};
pub use run::{exit_code, run, RunOptions, RunReport};
