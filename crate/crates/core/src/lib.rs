//! Kraus representations connecting pairs of density matrices.
//!
//! The crate builds operator-sum representations `ρ_t = Σ_μ M_μ ρ_0 M_μ†`
//! with `Σ_μ M_μ† M_μ = I` for any two qubit states, including states reached
//! by reduced dynamics from system–environment correlated initial states,
//! where the usual construction from the joint unitary does not apply.
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, `e^{−iHt}`,
//!   Kronecker products and partial traces.
//! - [`state`]: validated density matrices, Bloch coordinates, diagonalising
//!   bases.
//! - [`kraus`]: Kraus-set constructors, channel application and verification.
//! - [`dynamics`]: joint evolution, correlation operator, inhomogeneous term,
//!   the two-qubit controlled-NOT example, local-unitary factorisation.
//! - [`io`]: JSON encodings used by the `krauslab` binary.
//! - [`sweep`]: time-grid tabulation behind `krauslab sweep`.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod kraus;
pub mod linalg;
pub mod random;
pub mod state;
pub mod sweep;

pub use error::{Error, Result};
pub use kraus::{ChannelReport, KrausSet};
pub use linalg::{ComplexMatrix, ComplexScalar};
pub use state::{BlochVector, DensityMatrix};

/// Absolute max-norm tolerance used wherever none is given.
pub const DEFAULT_TOL: f64 = 1e-10;
