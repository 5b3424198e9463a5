//! Two qubits under collective dephasing with a finite-time local drive:
//! stationary concurrence and entropy, and remote control of their
//! entanglement through a GHZ partner and a quantum-eraser measurement.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver, exponential.
//! - [`states`]: Bell, Werner and GHZ states, X-state coefficients.
//! - [`dynamics`]: Liouvillian, propagation and the stationary state.
//! - [`measures`]: concurrence and Von Neumann entropy.
//! - [`eraser`]: conditional-block evolution and the qubit-3 measurement.
//! - [`sweep`]: parameter sweeps and extrema matching.
//! - [`output`], [`verify`], [`cli`]: front-end plumbing.

pub mod cli;
pub mod dynamics;
pub mod eraser;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod output;
pub mod sampling;
pub mod states;
pub mod sweep;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
