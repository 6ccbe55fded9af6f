//! File formats, simulation and the command-line front-end for
//! block-frequency two-sample tests.

pub mod catalog;
pub mod cli;
pub mod config;
pub mod csvio;
pub mod report;
pub mod simulate;

pub use seblocks_core as core;
