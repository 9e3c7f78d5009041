use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two objects that must live on the same space do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The steady-state kernel is degenerate or the constrained solve did not
    /// reach the requested residual.
    #[error("steady-state solve ill-conditioned: residual {residual:.3e} exceeds {tolerance:.3e}")]
    DegenerateKernel { residual: f64, tolerance: f64 },

    /// The adaptive integrator drove the step size below its floor.
    #[error("step size underflow at t = {t:.6e}: system too stiff for the requested tolerance")]
    Stiffness { t: f64 },

    /// A dense linear-algebra backend call failed.
    #[error("linear algebra backend failure: {0}")]
    Backend(String),
}

pub type Result<T> = std::result::Result<T, Error>;
