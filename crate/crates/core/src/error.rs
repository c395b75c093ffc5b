use thiserror::Error;

use crate::linalg::SchurForm;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// The QR iteration ran out of sweeps. The partially reduced form is kept
    /// for inspection; its eigenvalues must not be consumed.
    #[error("{routine} did not converge within {iterations} iterations")]
    Convergence {
        routine: &'static str,
        iterations: usize,
        partial: Option<Box<SchurForm>>,
    },

    #[error("matrix is singular to working tolerance (rank {rank} < {n})")]
    Singular { rank: usize, n: usize },

    #[error(
        "matrix is defective: eigenvalue {value} has algebraic multiplicity {am} but geometric multiplicity {gm}; \
         no eigenbasis exists, so eigendecomposition-based analysis is unavailable"
    )]
    Defective { value: String, am: usize, gm: usize },

    #[error("eigendecomposition requires a diagonalizable verdict, got {0}")]
    NotCertified(String),

    #[error("eigenvector matrix is ill-conditioned (condition number {0:.3e})")]
    Conditioning(f64),

    #[error("invalid tolerance: {0}")]
    Tolerance(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("degenerate table: {0}")]
    DegenerateTable(String),

    #[error("invalid shock scenario: {0}")]
    Scenario(String),

    #[error("infeasible fixture profile: {0}")]
    Profile(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
