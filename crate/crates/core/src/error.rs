use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user-facing input (coefficients, band sets, JSON payloads).
    /// The message carries a path-like location when one exists.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A quadrature did not reach the requested tolerance.  Carries the
    /// last estimate and the estimated error.
    #[error("quadrature did not converge: estimate {estimate}, error {error_estimate}, tol {tol}")]
    QuadratureNonConvergence {
        estimate: f64,
        error_estimate: f64,
        tol: f64,
    },

    /// Linear algebra failure (singular system, eigensolver stall).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A matrix expected to be Hermitian is not; names the offending entry.
    #[error("matrix not Hermitian at entry ({row},{col}): |a - conj(b)| = {deviation:.3e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    /// Analytic continuation could not pick a branch unambiguously.
    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),

    /// Iterative solver ran out of iterations.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// Structurally degenerate data (vanishing diagonals, collapsed gaps).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
