use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({requirement})")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The truncation radius `L√m` is so small that the Gaussian mass inside
    /// it underflows.
    #[error("degenerate truncation L = {l} for m = {m}: inner Gaussian mass underflows")]
    DegenerateL { m: usize, l: f64 },

    #[error("lattice {kind} is not supported in dimension {m}")]
    UnsupportedLattice { kind: &'static str, m: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("quadrature did not converge: achieved error {achieved:e}, target {target:e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, value: f64, requirement: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            requirement,
        })
    }
}
