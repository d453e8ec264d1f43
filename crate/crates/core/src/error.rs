use thiserror::Error;

pub type Result<T> = std::result::Result<T, FracError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("principal value did not converge: {0}")]
    NonConvergent(String),

    #[error("singular point lies on the domain boundary")]
    SingularityOnBoundary,

    #[error("subdivision budget of {0} cells exceeded before tolerance was met")]
    SubdivisionBudgetExceeded(usize),

    #[error("tail diverges: decay exponent {exponent} <= dimension {dim}")]
    DivergentTail { exponent: f64, dim: f64 },

    #[error("lattice sum diverges: exponent {exponent} <= rank {rank}")]
    DivergentSum { exponent: f64, rank: usize },

    #[error("point is on the boundary of the set (distance {0:e})")]
    OnBoundary(f64),

    #[error("profile is not invertible: {0}")]
    NotInvertible(String),

    #[error("spheres overlap: scaled minimal lattice distance {0} does not exceed the enlarged diameter")]
    Overlap(f64),

    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    #[error("integrability gate failed: {0}")]
    IntegrabilityFailure(String),

    #[error("vector is not tangent to the boundary (|v.n| = {0:e})")]
    NotTangent(f64),

    #[error("interaction diverges: sets overlap on a set of positive measure")]
    DivergentInteraction,

    #[error("no sign change of the linearized operator on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("continuation step too large: {0}")]
    StepTooLarge(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

impl FracError {
    /// Failures of the numerics, as opposed to rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            FracError::NonConvergent(_)
                | FracError::SubdivisionBudgetExceeded(_)
                | FracError::NewtonDiverged { .. }
                | FracError::StepTooLarge(_)
                | FracError::NoSignChange { .. }
        )
    }
}
