//! Numerical toolkit for 2×2 Dirac systems
//!
//! ```text
//! B y′(x) + V(x) y(x) = λ y(x),   x ∈ (0,π),
//! ```
//!
//! with B = diag(−i, i), an off-diagonal potential V = ((0,P),(Q,0)), and a
//! complex spectral parameter λ. The crate constructs fundamental solution
//! matrices in factored, overflow-safe form (exponential phase × bounded
//! remainder), verifies the large-|Im λ| asymptotics of their columns, solves
//! two-point boundary eigenvalue problems by the argument principle, builds
//! biorthogonally normalized root-function systems, and measures rank-one
//! spectral projector norms, whose growth witnesses failure of the basis
//! property.
//!
//! Everything that can reach size e^{π|Im λ|} is carried in the log domain
//! ([`LogMagnitude`], [`LogComplex`]); linear values are materialized only on
//! demand.

pub mod asymptotics;
pub mod bvp;
pub mod config;
mod error;
pub mod expansion;
pub mod experiment;
pub mod grid;
mod linalg;
pub mod logmag;
pub mod potential;
pub mod solver;
pub mod space;

pub use error::Error;
pub use grid::Grid;
pub use logmag::{LogComplex, LogMagnitude};
pub use potential::Potential;
pub use space::{GridFunction2, HalfPlane, SpectralParameter};

/// Half-width of the strip where the two half-plane representations overlap:
/// Ω₊ = {Im λ > −R_OVERLAP}, Ω₋ = {Im λ < R_OVERLAP}.
pub const R_OVERLAP: f64 = 1.0;

/// Everything below this |λ| is excluded from asymptotic sweeps.
pub const LAMBDA_FLOOR: f64 = 1.0;

pub type Complex = num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;
