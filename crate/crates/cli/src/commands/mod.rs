//! Command implementations. Each takes the merged [`RunConfig`], writes its
//! artifacts under `config.out`, and returns an [`Outcome`] listing the files
//! and a JSON summary.
//!
//! [`RunConfig`]: crate::config::RunConfig
//! [`Outcome`]: crate::output::Outcome

pub mod g2;
pub mod revival;
pub mod steady;
pub mod transient;
