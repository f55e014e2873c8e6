//! File formats, configuration and reference scenarios behind the
//! `oscphasor` command-line tool.

pub mod config;
pub mod csvio;
pub mod error;
pub mod report;
pub mod reproduce;
