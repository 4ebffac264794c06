//! Configuration, figure presets, sweeps and the `echomem` command line.

pub mod checks;
pub mod cli;
pub mod config;
mod error;
pub mod metrics;
pub mod presets;
pub mod sweep;

pub use error::{AppError, Result};
