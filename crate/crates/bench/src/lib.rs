//! Sweep runner, worked-example experiment and plotting for the HHL simulator.

pub mod config;
pub mod eq3;
pub mod error;
pub mod plot;
pub mod records;
pub mod sweep;

pub use config::{Cell, FamilyTemplate, SweepConfig};
pub use eq3::{run_eq3_experiment, Eq3Outcome};
pub use error::{BenchError, Result};
pub use plot::emit_plots;
pub use records::{summarize, SummaryRecord, SweepRecord};
pub use sweep::{run_sweep, run_sweep_with, SweepOptions, SweepOutcome};
