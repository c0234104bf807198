//! Strong binary classifiers trained by discrete global optimization.
//!
//! Weak-classifier selection is cast as a quadratic unconstrained binary
//! optimization (QUBO) over binary weights with an L0 penalty. The crate
//! provides:
//!
//! - [`data`]: datasets, synthetic generators, even splits, CSV ingestion
//! - [`stumps`]: the order-1/order-2 decision-stump dictionary
//! - [`qubo`]: training objectives as explicit problem instances
//! - [`solvers`]: exhaustive enumeration and single-flip tabu search
//! - [`boosting`]: AdaBoost baseline and the QBoost inner/outer loops
//! - [`adiabatic`]: exact-diagonalization spectra of the interpolated Hamiltonian
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default); see [`par`] for the runtime switch used by the benches.

pub mod adiabatic;
pub mod boosting;
pub mod data;
mod error;
pub mod io;
pub mod par;
pub mod qubo;
pub mod rng;
pub mod solvers;
pub mod stumps;

pub use error::{Error, Result};
