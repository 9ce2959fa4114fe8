//! Command-line front end for the `qexp` library: argument parsing, JSON
//! input and output, and the randomized property suite.

pub mod cli;
pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod suite;
