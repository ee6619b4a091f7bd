//! Scenario driver for `rabi-core`: JSON configs, figure presets, CSV output
//! with a manifest, and plotting scripts.

pub mod config;
pub mod error;
pub mod plot;
pub mod presets;
pub mod runner;

pub use config::{Batch, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use runner::{run_batch, Manifest};
