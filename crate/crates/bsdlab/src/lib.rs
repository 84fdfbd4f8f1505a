//! Command-line front end for `bsdlab-core`: curve resolution, the corpus
//! file, and deterministic JSON/CSV reports.

pub mod cli;
pub mod report;

pub use bsdlab_core::corpus;
pub use cli::run;
