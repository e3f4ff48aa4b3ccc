//! Spectral analysis of the two-boson spin-boson Hamiltonian with bounded
//! dispersion.
//!
//! The crate computes the essential spectrum of the reduced `2x2` block
//! operator matrix (and of the full two-boson Hamiltonian) as an explicit
//! union of closed intervals, locates the pencil roots `E` and `F` that bound
//! the three-particle branches, evaluates the four critical couplings at
//! which spectral gaps open, and cross-checks everything numerically by
//! discretizing the operators on quadrature grids and counting gap
//! eigenvalues through Birman-Schwinger operators.
//!
//! Entry points:
//! - [`model`]: parameter functions `omega`, `lambda`, moment integrals,
//!   regularity flags, the built-in model registry (`m1()` .. `m4()`).
//! - [`pencil`]: the scalar pencil `Phi(z)`, its roots, critical couplings,
//!   gap asymptotics.
//! - [`spectrum`]: interval unions for the essential spectrum.
//! - [`discretize`]: dense operator matrices, eigensolves, inertia counts.
//! - [`schur`]: Schur complements, kernel splittings, Birman-Schwinger
//!   counting.
//! - [`cli`]: the command surface used by the `spinboson` binary.

pub mod cli;
pub mod discretize;
pub mod extreal;
pub mod model;
pub mod pencil;
pub mod quad;
pub mod schur;
pub mod spectrum;

pub use extreal::ExtReal;
pub use model::{ModelSpec, QuadratureSettings, RegularityReport};
pub use pencil::{CriticalCouplings, PencilParams, RootResult};
pub use spectrum::{IntervalUnion, SpectrumReport};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dispersion is numerically constant (range {range:.3e})")]
    DegenerateDispersion { range: f64 },
    #[error("omega + shift is negative on a set of positive measure")]
    NegativeDenominator,
    #[error("integral neither converged nor diverged cleanly (shell ratio {ratio:.4})")]
    Indeterminate { ratio: f64 },
    #[error("z = {z} lies inside the forbidden band [{lo}, {hi}]")]
    DomainError { z: f64, lo: f64, hi: f64 },
    #[error("gamma = {gamma} is outside the validity range for this expansion")]
    RangeError { gamma: f64 },
    #[error("denominator vanishes near k = {k}")]
    SingularDenominator { k: f64 },
    #[error("Delta does not have a definite sign on the grid")]
    SignViolation,
    #[error("edge-kernel regularity condition fails for this model")]
    RegularityRequired,
    #[error("critical couplings violate the ordering assumed by the case table: {details}")]
    OrderingViolation { details: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigensolver failed to converge")]
    ConvergenceFailure,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
