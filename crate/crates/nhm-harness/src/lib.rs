//! Experiment runner for the non-Hermitian Maryland model: reproduces the
//! reference figures as CSV/JSON artifacts and runs the verification suite.

pub mod config;
pub mod experiments;
pub mod output;
pub mod plot;
pub mod verify;

pub use config::{ApproximantChoice, ExperimentConfig, ExperimentKind, OutputFormat};
