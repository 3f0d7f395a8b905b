//! Mass-in-mass chain, its coupled continuum limit, the eight-component
//! generalized Dirac equation, dispersion branches, plane-wave solutions
//! and 1-D field evolution.

pub mod algebra;
pub mod chain;
pub mod cli;
pub mod dispersion;
pub mod evolution;
pub mod output;
pub mod plane_waves;
pub mod report;
pub mod spectral;
pub mod verify;

pub use algebra::QuantumParams;
pub use chain::{ChainBranch, ChainParams};
pub use dispersion::Branch;
pub use plane_waves::Spin;
pub use report::{Check, VerificationReport};
