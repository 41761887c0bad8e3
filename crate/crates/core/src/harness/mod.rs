//! Experiment runners, CSV and manifest I/O, and the command-line front end.

pub mod bench;
pub mod cit;
pub mod cli;
pub mod entropy;
pub mod io;
pub mod manifest;
pub mod roc;
pub mod staircase;
pub mod te;
