//! Stabilizer learning under depolarizing noise, at desk scale.
//!
//! The crate implements the LPN / SympLPN / LSN / QSDP problem family, every
//! reduction between them as an executable transformation, exact brute-force
//! oracles that serve as ground truth, a sign-tracking stabilizer simulator,
//! and a mixing-time laboratory for the local Clifford chain.

pub mod error;
pub mod gf2;
pub mod mixing;
pub mod noise;
pub mod oracles;
pub mod problems;
pub mod reductions;
pub mod rng;
pub mod stabsim;
pub mod stats;
pub mod symplectic;

pub use error::{Error, Result};
pub use gf2::{BitMat, BitVec};
pub use symplectic::{IsotropicSet, PauliVec, SympMat};
