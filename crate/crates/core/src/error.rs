use thiserror::Error;

/// Errors raised by covariance-matrix validation and Gaussian-state numerics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}; expected a square matrix of even dimension")]
    BadShape { rows: usize, cols: usize },

    #[error("matrix is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {dev:.3e} exceeds {tol:.0e}")]
    NotSymmetric {
        i: usize,
        j: usize,
        dev: f64,
        tol: f64,
    },

    #[error("matrix is not symplectic: max |S O S^T - O| = {dev:.3e} exceeds {tol:.0e}")]
    NotSymplectic { dev: f64, tol: f64 },

    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },

    #[error("mode index {index} listed twice")]
    DuplicateMode { index: usize },

    #[error("empty mode selection")]
    EmptyModeSet,

    #[error("{op}: {name} = {value} outside domain ({requirement})")]
    Domain {
        op: &'static str,
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("parameter {name} = {value} invalid: {requirement}")]
    Param {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("eigenvalue iteration did not converge on a {dim}x{dim} matrix:\n{matrix}")]
    EigenNonConvergence { dim: usize, matrix: String },

    #[error("eigenvalue moduli do not collapse into degenerate pairs ({lo} vs {hi})")]
    UnpairedSpectrum { lo: f64, hi: f64 },

    #[error("matrix is not in two-mode block form [[a I, c sz], [c sz, b I]]; deviation {dev:.3e}")]
    NotBlockForm { dev: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error indicates bad input (as opposed to a numerical failure).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::EigenNonConvergence { .. } | Error::UnpairedSpectrum { .. }
        )
    }
}
