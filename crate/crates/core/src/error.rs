use thiserror::Error;

/// Errors raised by constructions and checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("semi-inner product has a negative eigenvalue {value:.3e}")]
    NegativeEigenvalue { value: f64 },

    #[error("not a *-homomorphism (residual {residual:.3e})")]
    NotHomomorphism { residual: f64 },

    #[error("inner product escapes the coefficient algebra (residual {residual:.3e})")]
    InnerProductEscapes { residual: f64 },

    #[error("map is not completely positive (Gram eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A construction was asked to run outside its hypotheses.
    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
