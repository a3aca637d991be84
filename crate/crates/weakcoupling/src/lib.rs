//! Numerical toolkit for weakly coupled bound states of Schrödinger-type operators whose
//! kinetic energy vanishes on a sphere: the Fermi-surface operator 𝒱_S, the Birman–Schwinger
//! operator BS(e) and its splittings, weak-coupling eigenvalue curves, trial-state
//! certificates and the potential norms that enter as hypotheses.

pub mod asymptotics;
pub mod birman_schwinger;
pub mod dense;
pub mod error;
pub mod harmonic;
pub mod krylov;
pub mod potentials;
pub mod quadrature;
pub mod trial_functions;
pub mod vs_operator;

pub use error::{Error, Result};
pub use harmonic::{KineticSymbol, MeasureConvention, Profile};
pub use potentials::{Model, Potential};
