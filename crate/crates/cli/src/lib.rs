//! Experiment runner: configuration, task scheduling, output files and run
//! manifests. The `lab` binary is a thin wrapper around [`run`] and
//! [`replay`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod runner;

pub use anderson_core;
pub use config::{Coupling, Experiment, RunConfig};
pub use error::{LabError, Result};
pub use runner::{
    compute, default_out, replay, run, ExperimentOutput, ReplayReport, RunManifest, RunOptions, RunOutcome,
    TaskRecord, MANIFEST_FILE, REPORT_FILE, RESULTS_FILE,
};

/// Version written into manifests; replays require an exact match.
pub const VERSION: &str = anderson_core::VERSION;
