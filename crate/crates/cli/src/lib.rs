//! Library side of the `olmr` command-line harness.
//!
//! `main` is a thin clap wrapper over [`runner`]; tests and the
//! acceptance suite call the runner functions directly.

pub mod config;
pub mod error;
pub mod learners;
pub mod metrics;
pub mod runner;
