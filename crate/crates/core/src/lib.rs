//! Single-excitation dynamics of XX spin chains with Krawtchouk
//! nearest-neighbour couplings and next-to-nearest-neighbour extensions.
//!
//! The Hamiltonian restricted to one spin up is `H = αJ² + βJ`, where `J` is
//! the Krawtchouk hopping operator. Its eigenvectors are normalized Krawtchouk
//! polynomials, so propagation is an exact spectral sum. On top of that the
//! crate predicts perfect state transfer (PST) and balanced fractional revival
//! from the rational ratio `α/β = p/q` and checks those predictions against
//! simulated dynamics, including an independent dense matrix-exponential
//! propagator.
//!
//! Module map:
//!
//! - [`krawtchouk`]: weights, polynomial values and the orthogonal eigenvector matrix.
//! - [`chain`]: chain parameters, coupling profile, `J` and `H` matrices.
//! - [`spectral`]: spectral decomposition and propagation.
//! - [`oracle`]: scaling-and-squaring propagator used for cross-validation.
//! - [`revival`]: exact predictors, fidelity scans and event detection.
//! - [`export`]: CSV/JSON serialization of profiles, states, scans and reports.

pub mod chain;
pub mod error;
pub mod export;
pub mod krawtchouk;
pub mod oracle;
pub mod revival;
pub mod spectral;

pub use chain::{ChainSpec, CouplingProfile, HamiltonianMatrix};
pub use error::{Error, Result};
pub use krawtchouk::KrawtchoukTable;
pub use revival::{
    FidelityScan, RationalRatio, RevivalEvent, RevivalKind, RevivalPrediction,
    VerificationReport,
};
pub use spectral::{SpectralData, StateVector};

/// Largest chain length index accepted anywhere in the crate.
pub const MAX_N: usize = 100;

/// Largest chain length index for which the stated numerical tolerances hold.
pub const TOLERANCE_N: usize = 40;
