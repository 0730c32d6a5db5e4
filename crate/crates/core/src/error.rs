use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of the construction (e.g. `ε < ℓ/6`, `k/n < δ`) does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A truncated spectrum ran out before the completeness criterion was met.
    #[error("incomplete spectrum: {0}")]
    Incomplete(String),

    #[error("mesh does not resolve interval [{start}, {end}]: {elements} elements, need at least {required}")]
    Resolution {
        start: f64,
        end: f64,
        elements: usize,
        required: usize,
    },

    #[error("interior problem is ill-posed: Cholesky pivot {pivot:e} at row {row}")]
    IllPosed { row: usize, pivot: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("Rayleigh quotient undefined: function vanishes on every Steklov node")]
    UndefinedQuotient,

    #[error("infeasible: {0}")]
    Infeasible(String),
}
