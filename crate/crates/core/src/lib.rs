//! Simulation and analysis of long-range hybrid Clifford circuits.

pub mod circuit;
pub mod clifford;
pub mod error;
pub mod experiment;
pub mod gf2;
pub mod heff;
pub mod observables;
pub mod pauli;
pub mod rng;
pub mod scaling;
pub mod tableau;

pub use error::{Error, Result};
