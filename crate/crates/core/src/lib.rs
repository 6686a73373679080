//! Two-level ⊗ two-level collapse dynamics.
//!
//! A nonlinear, stochastic extension of Schrödinger evolution for entangled
//! pairs, in which one energy scale `ε` controls how quickly an entangled
//! state collapses onto a factorized branch:
//!
//! - [`qstate`]: states, the ψ-matrix picture and entanglement measures
//! - [`dynamics`]: the fixed-sign nonlinear generator and population ODEs
//! - [`stochastic`]: random-sign games (gambler's ruin, double or nothing)
//!   and ensemble statistics
//! - [`phenomenology`]: the CP-violation lower bound on `ε` and the
//!   saturation prediction for B mesons
//!
//! Ensembles run on rayon when the `parallel` feature is enabled (default).

pub mod dynamics;
pub mod error;
pub mod linalg;
mod par;
pub mod phenomenology;
pub mod qstate;
pub mod stochastic;
pub mod units;

pub use error::{Error, Result};
pub use par::Execution;
