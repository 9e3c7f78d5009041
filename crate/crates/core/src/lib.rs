//! Phase-space toolkit for a coherently driven Jaynes–Cummings (JC) system operated
//! at its two-photon resonance.
//!
//! A single two-level emitter coupled to one cavity mode (coupling `g`, cavity field
//! decay `κ`, spontaneous emission `γ`) and driven through the cavity at the
//! two-photon resonance of the JC ladder develops strongly nonclassical intracavity
//! fields: bimodal Wigner distributions, transient Wigner negativity conditioned on a
//! photon emission, a quantum beat in the intensity correlation, and — in the closed,
//! atom-driven variant — collapse and revival of Rabi oscillations.
//!
//! The crate provides two independent routes to these quantities and the machinery to
//! cross-validate them:
//!
//! * [`master_equation`] — the full dissipative Lindblad dynamics on a truncated
//!   Fock ⊗ two-level space: Liouvillian assembly, steady state, time evolution, and
//!   two-time correlations via the quantum regression procedure (the numerical oracle).
//! * [`effective_model`] — closed-form results of the dressed-state four-level model
//!   that captures the resonance: effective rates and shifts, transient and steady
//!   density-matrix elements, the analytic steady-state Wigner function, and the
//!   analytic intensity correlation g²(τ).
//! * [`phasespace`] — Wigner and Husimi-Q evaluation of arbitrary cavity states on
//!   grids, moments, extremum location, and negativity detection.
//! * [`revival`] — the non-dissipative, atom-driven JC system in a displaced frame:
//!   Q-function series, asymptotic form, photon-number trace, and a direct
//!   Schrödinger-integration oracle.
//! * [`operators`] — the underlying Hilbert-space plumbing (ladder operators, dressed
//!   states, coherent states, displacement).
//! * [`ode`] — the adaptive embedded Runge–Kutta 4(5) integrator shared by all
//!   time-dependent routes.
//!
//! Conventions used throughout: `ħ = 1`; rates are quoted in units of a reference
//! rate (γ unless stated otherwise); the drive frame rotates at the drive frequency
//! so all generators are time-independent; the composite basis index is `2n + s`
//! with photon number `n` and atom index `s ∈ {0 ≡ −(ground), 1 ≡ +(excited)}`.

pub mod effective_model;
mod error;
mod linalg;
pub mod master_equation;
pub mod ode;
pub mod operators;
pub mod phasespace;
pub mod revival;

pub use error::{Error, Result};
