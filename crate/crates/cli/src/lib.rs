//! Library surface of the experiment runner; the `ponlab` binary is a
//! thin clap wrapper over these modules.

pub mod complexity;
pub mod config;
pub mod runner;
pub mod svg;
