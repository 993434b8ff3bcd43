//! Config-driven experiments on top of [`tailproc_core`]: model building,
//! the operation runner, verification and parameter sweeps, and the file
//! formats they write.

pub mod config;
pub mod error;
pub mod exec;
pub mod fmt;
pub mod io;
pub mod model;
pub mod run;
pub mod verify;

pub use tailproc_core as core;
