//! Sweeps, reports and configuration for the command-line front end.

pub mod config;
pub mod report;
pub mod sweep;

pub use config::{linspace, SweepConfig};
pub use report::{check_src, table1, SrcCheck, Table1Row};
pub use sweep::{sweep_beta, sweep_grid, BuiltGate, GateReport, GridResult, GridRow, SweepResult};
