//! Models of a gravimeter built from an optomechanical cavity whose
//! photon-phonon coupling can be made nonreciprocal by a dissipative
//! channel.
//!
//! Everything here is `no_std` with `alloc`: parameter types, Fock-space
//! operator and Liouvillian assembly, mean-field steady states, the
//! linearized covariance, the homodyne error budget and the weak-drive
//! quantum Fisher information.
#![no_std]

extern crate alloc;

pub mod error;
pub mod fluctuations;
pub mod linalg;
pub mod mean_field;
pub mod metrology;
pub mod model;
pub mod params;
pub mod poly;
pub mod sparse;
pub mod weak_drive;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
pub use params::{Coupling, SystemParams};
