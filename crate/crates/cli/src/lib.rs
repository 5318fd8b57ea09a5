//! Command implementations and file formats for the `bosonic` binary.

pub mod commands;
pub mod config;
pub mod formats;
