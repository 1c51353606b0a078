use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the requested formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The closed form degenerates (e.g. division by a vanishing `U_k`).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Adaptive quadrature hit its depth limit before reaching the tolerance.
    #[error("quadrature did not converge: partial result {partial:e}, error estimate {error:e} (tolerance {tolerance:e})")]
    Convergence {
        partial: f64,
        error: f64,
        tolerance: f64,
    },

    /// The tridiagonal eigensolver exceeded its iteration budget.
    #[error("eigensolver did not converge at index {index} after {iterations} iterations")]
    Eigensolver { index: usize, iterations: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {value}")))
    }
}
