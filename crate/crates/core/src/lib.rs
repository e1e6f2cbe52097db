//! Exact and effective dynamics of a spin-½ particle hopping on a two- or
//! three-site lattice whose end sites carry static spins.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; IO, configuration and the command-line driver live
//! in the companion `hopspin` crate.
//!
//! Module map:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, propagation,
//!   partial trace / transpose.
//! - [`model`]: lattice configuration, basis layout and Hamiltonian builders.
//! - [`dynamics`]: time grids, trajectories, observables and closed-form
//!   two-level solutions.
//! - [`analysis`]: log-negativity, drift monitoring, exact-vs-effective
//!   deviation and period estimation.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod dynamics;
pub mod linalg;
pub mod model;

mod error;

pub use error::Error;
pub use linalg::{Complex64, ComplexMatrix, Eigensystem, StateVector};
pub use model::{BasisLayout, EffectiveVariant, ModelSpec, Spin, StaticPreset};
