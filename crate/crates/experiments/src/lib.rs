//! Training loops, experiment sweeps and output writers built on
//! `rlcompile-core`.

pub mod config;
pub mod error;
pub mod generalize;
pub mod instance;
pub mod output;
pub mod sweep;
pub mod trace;
pub mod train;

pub use config::ExperimentConfig;
pub use error::{ExpError, ExpResult};
pub use trace::{Method, TraceRow, TrainingTrace};
