//! Benchmark of multi-agent learners in repeated strictly ordinal games.

pub mod error;
pub mod game;
pub mod harness;
pub mod learners;
pub mod metrics;
pub mod report;
pub mod solvers;

pub use error::{Error, Result};
