//! Simulation of an open quantum system under continuous weak measurement,
//! with online state estimation from windows of measurement records via
//! constrained least squares.
//!
//! The library is organized as:
//! - [`linalg`], [`basis`], [`state`]: dense complex linear algebra for
//!   small dimensions and the quantum primitives (density matrices,
//!   fidelity, Bloch coordinates, projection onto the state set);
//! - [`dynamics`]: weak-measurement Kraus operators, stochastic noise, and
//!   the coupled state/operator recursions, plus the trajectory simulator;
//! - [`estimator`]: the sliding window of (operator, record) pairs and the
//!   constrained least-squares state estimate;
//! - [`config`], [`harness`], [`emit`]: experiment configuration, the
//!   case runners and noise sweeps, and CSV/JSON output.

pub mod basis;
pub mod config;
pub mod dynamics;
pub mod emit;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod linalg;
pub mod state;

pub use config::SimulationConfig;
pub use error::{Error, Result};
pub use linalg::{devectorize, eigh, hermitize, psd_sqrt, vectorize, CMat, CVec};
pub use state::{
    bloch_from_density, density_from_bloch, expectation, fidelity, project_to_density,
    simplex_project, BlochVector, DensityMatrix,
};
