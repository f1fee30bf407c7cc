//! Scenario ingestion, command surface, and result serialization for the
//! dispersion-cancellation simulator.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{cmd_analyze, cmd_bounds, cmd_montecarlo, cmd_sweep, CmdError, SweepParam};
pub use config::{parse_config, ConfigError, ScenarioConfig, SourceConfig, Violation};
pub use report::{fmt_f64, mc_trace_csv, scenario_hash, sweep_csv, trace_csv, ReportRecord};
