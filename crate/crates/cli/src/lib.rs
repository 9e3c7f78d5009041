//! Command-line companion to `jcps-core`: batch evaluation of the driven
//! Jaynes–Cummings two-photon resonance into CSV fields, trace files, and
//! JSON reports, plus the acceptance table that cross-checks every headline
//! number against its independent route.
//!
//! All outputs are deterministic: a given merged configuration produces
//! byte-identical files, and every file header carries the configuration
//! hash, truncations, and tolerances that produced it.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;
