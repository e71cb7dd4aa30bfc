//! Config-driven scenario runner for shape-invariant matrix superpotentials:
//! residual verification, low-spectrum computation, zero-mode construction
//! and the raising-operator ladder, with JSON summaries and plot-ready CSV
//! tables.

pub mod builtin;
pub mod config;
pub mod emit;
pub mod error;
pub mod report;
pub mod runner;

pub use builtin::builtin_example;
pub use config::{ScenarioConfig, Task, SCENARIO_SCHEMA};
pub use emit::{emit, EmitFormat};
pub use error::{CliError, Result};
pub use report::{RunReport, TaskStatus, REPORT_SCHEMA};
pub use runner::run;
