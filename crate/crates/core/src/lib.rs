//! Magnetorquer-only spacecraft attitude stabilization with piecewise-constant
//! dipole moments.
//!
//! The crate computes the admissible sampling range `(0, T*)` and the
//! gain-scaling bound `ε₀` from the averaged sampled-data loop, and checks
//! them by simulating the nonlinear closed loop.
//!
//! * [`attmath`]: quaternions, attitude matrix, kinematics.
//! * [`geomag`]: circular orbit and dipole geomagnetic field.
//! * [`matan`]: eigenvalues, Hurwitz tests, Lyapunov equation, norms.
//! * [`avg`]: held-input integrals and the averaged field matrices.
//! * [`design`]: `A_s(T)`, `A_o(T)`, `T*` and `ε₀`.
//! * [`control`]: the four magnetic control laws.
//! * [`sim`]: closed-loop and linearized simulation.
//! * [`cli`]: scenario files, commands, CSV output.

// Range checks are written as `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attmath;
pub mod avg;
pub mod cli;
pub mod control;
pub mod design;
pub mod error;
pub mod geomag;
pub mod matan;
pub mod sim;

pub use error::{Error, ErrorCategory, Result};
