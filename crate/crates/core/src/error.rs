use thiserror::Error;

/// Errors raised by the solver core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "hermitian symmetry violated: imaginary residue {residue:.3e} exceeds {threshold:.3e}"
    )]
    HermitianViolation { residue: f64, threshold: f64 },

    #[error("adaptive quadrature did not reach tolerance {tol:.1e} (estimate {estimate:.3e}) after {intervals} subintervals")]
    Quadrature {
        tol: f64,
        estimate: f64,
        intervals: usize,
    },

    #[error("direct collision sum refused: P = {points} exceeds the cost guard {limit}")]
    CostGuard { points: usize, limit: usize },

    #[error("non-finite value in Runge-Kutta stage {stage}")]
    NonFinite { stage: usize },

    #[error("solution blew up at step {step} (t = {time}); last good t = {last_good}")]
    BlowUp {
        step: usize,
        time: f64,
        last_good: f64,
    },

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("observer failed: {0}")]
    Observer(String),
}

pub type Result<T, E = SolverError> = std::result::Result<T, E>;
