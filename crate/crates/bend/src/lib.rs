//! Experiment orchestration and file formats for bent waveguide lattices.
//!
//! The numerics live in [`bendlattice_core`]; this crate turns a JSON
//! configuration into layout documents, CSV tables and a digest manifest.

pub mod config;
pub mod csvfmt;
mod error;
pub mod experiment;
pub mod layout_doc;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use experiment::{analyze_angle, run_experiment, table1_report, AngleAnalysis, Manifest, RunSummary, Stages};
