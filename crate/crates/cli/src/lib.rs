//! IO and command layer over the engine crate.
//!
//! The engine (`heartgan-core`) is pure computation; everything that
//! touches the outside world lives here: CSV beat and record formats,
//! binary checkpoints, `key = value` configuration files, run
//! manifests, SVG rendering, and the five `heartgan` subcommands. The
//! split keeps the engine `no_std`-portable and keeps every file format
//! testable without spawning a process.

pub mod checkpoint;
pub mod commands;
pub mod config_file;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod util;

pub use error::{CliError, Result};
