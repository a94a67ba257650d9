use thiserror::Error;

/// Errors produced by kernel evaluation, quadrature, and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("kernel is singular at ({x}, {y})")]
    Singularity { x: f64, y: f64 },

    #[error("series does not converge at x = 0; use the integral representation")]
    SeriesDivergent,

    /// The requested accuracy was not reached. `best` is the best estimate
    /// available and `achieved` its estimated absolute error.
    #[error("accuracy not reached: best estimate {best}, achieved error {achieved:e}")]
    Accuracy { best: f64, achieved: f64 },

    #[error("operator is not uniformly elliptic: |rho| = {0} >= 1")]
    Ellipticity(f64),

    #[error("finite-difference scheme is not diagonally dominant: {0}")]
    Stability(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}
