//! Command-line front end and refinement experiments for discrete
//! Monge-Ampère measures on lattices.

pub use mafn_core as core;

pub mod builtins;
pub mod config;
pub mod experiments;
pub mod io;
pub mod parse;
pub mod svg;
