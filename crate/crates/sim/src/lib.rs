//! Host side of the simulator: TOML configuration, satellite record files,
//! CSV exports, report output and the command implementations behind the
//! `lisl-sim` binary.

#![forbid(unsafe_code)]

pub mod commands;
pub mod config;
mod error;
pub mod export;
pub mod pipeline;
pub mod records;
pub mod report;
pub mod shared_cache;

pub use config::Config;
pub use error::{exit, Result, SimError};
