//! Fixtures, file formats, the verification pipeline and the command line.

pub mod cli;
pub mod files;
pub mod fixtures;
pub mod run;
