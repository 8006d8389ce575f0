//! Library surface behind the `bandit-net` binary: config parsing, the
//! subcommand implementations, and the CSV/SVG emitters.

pub mod commands;
pub mod config;
pub mod output;
