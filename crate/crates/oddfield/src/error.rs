//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by geometry contracts, root solvers and quadrature.
#[derive(Debug, Error)]
pub enum Error {
    /// The spacetime dimension is not an odd integer ≥ 5.
    #[error("dimension must be odd and >= 5, got {0}")]
    InvalidDimension(usize),

    /// A vector's length does not match the configured dimension.
    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A boost or grid axis outside 1..D-1 (or 0..D-1 where time is allowed).
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    /// A precondition on a scalar argument failed.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No retarded root of R² = 0 with R⁰ > 0 exists within the search range.
    #[error("no retarded root: {0}")]
    NoRetardedRoot(String),

    /// |R·v| fell below the safe threshold; the 1/(R·v) Jacobian is singular
    /// on the lightcone.
    #[error("near-lightcone degeneracy: |R.v| = {value:.3e} below threshold {threshold:.3e}")]
    NearLightcone { value: f64, threshold: f64 },

    /// Quadrature did not reach the requested tolerance.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// A Richardson / stencil extrapolation did not converge.
    #[error("extrapolation failure: {0}")]
    ExtrapolationFailure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 config/contract, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidDimension(_)
            | Error::DimensionMismatch { .. }
            | Error::AxisOutOfRange { .. }
            | Error::InvalidArgument(_) => 2,
            Error::NoRetardedRoot(_)
            | Error::NearLightcone { .. }
            | Error::QuadratureFailure(_)
            | Error::ExtrapolationFailure(_) => 3,
            Error::Io(_) => 4,
        }
    }
}
