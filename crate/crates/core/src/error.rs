use thiserror::Error;

/// Unified error type for all library operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian: ||M - M^H||_F = {residual:.3e} exceeds {tol:.1e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("trace is not 1: |tr - 1| = {deviation:.3e} exceeds {tol:.1e}")]
    InvalidTrace { deviation: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} below -{tol:.1e}")]
    NotPsd { min_eigenvalue: f64, tol: f64 },

    #[error("operation supports dimension {supported} only, found {found}")]
    UnsupportedDimension { supported: usize, found: usize },

    #[error("expectation value has non-negligible imaginary part {imag:.3e}")]
    ComplexExpectation { imag: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("time step too large: ||(L^H L/2 + iH) dt||_F = {norm:.3e} must be < 1")]
    StepTooLarge { norm: f64 },

    #[error("degenerate evolution step: trace {trace:.3e} at or below 1e-12")]
    DegenerateStep { trace: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attaches a simulation step index to an error bubbling out of a step.
    pub fn at_step(self, step: u64) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }

    /// Whether this error is a configuration/usage problem (as opposed to a
    /// numerical or i/o failure at run time).
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config { .. } => true,
            Error::AtStep { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
