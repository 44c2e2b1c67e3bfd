//! Command-line front end for `gapforge-core`: file formats, run manifests
//! and a thread-pool executor.
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod exec;
pub mod formats;
pub mod manifest;
pub mod plot;

pub use cli::run;
pub use error::CliError;
