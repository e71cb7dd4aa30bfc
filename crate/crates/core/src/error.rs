use thiserror::Error;

/// Errors produced by model construction, evaluation and the numerical solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Evaluation point sits at (or within machine tolerance of) a singularity.
    #[error("pole in channel {channel} at x = {x}")]
    Pole { channel: usize, x: f64 },

    /// Evaluation point lies outside the model's validity window.
    #[error("domain error at x = {x}: {reason}")]
    Domain { x: f64, reason: String },

    /// The resolvent matrix N(x) is not invertible at the evaluation point.
    #[error("singular resolvent matrix at x = {x}")]
    SingularMatrix { x: f64 },

    /// The partner-potential difference is not a constant multiple of the identity.
    #[error(
        "shape invariance violated: off-diagonal magnitude {off_diagonal:.3e}, \
         constancy spread {variation:.3e} exceed tolerance {tolerance:.3e}"
    )]
    NotShapeInvariant {
        off_diagonal: f64,
        variation: f64,
        tolerance: f64,
    },

    /// The eigenvalue search failed to bracket or refine the requested values.
    #[error("eigensolver failed to converge: {reason}")]
    Convergence { reason: String },

    /// Solution growth exceeded the overflow guard during ODE integration.
    #[error("stiffness guard tripped during integration: {reason}")]
    Stiffness { reason: String },

    /// No zero modes exist at the top of the requested raising chain.
    #[error("no zero modes available at parameter k = {k}")]
    EmptyLadder { k: f64 },

    /// Attempted to normalize a spinor with vanishing norm.
    #[error("cannot normalize a zero-norm spinor")]
    ZeroNorm,

    /// Invalid model description.
    #[error("invalid model: {0}")]
    Model(String),

    /// Invalid grid description.
    #[error("invalid grid: {0}")]
    Grid(String),

    /// Invalid argument to a solver operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(x: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            x,
            reason: reason.into(),
        }
    }
}
