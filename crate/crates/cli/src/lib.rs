//! Config-driven runner: single solves, convergence sweeps and comparison
//! against a high-degree reference, written out as CSV tables and plot data.

pub mod config;
pub mod output;
pub mod run;
pub mod selector;

pub use config::{parse_config, parse_config_with, ConfigError, Mode, RunSpec};
pub use run::{run, RunError, RunReport};
