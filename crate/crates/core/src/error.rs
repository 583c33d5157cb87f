use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classification used by front ends to pick exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input lies outside the domain of the requested quantity.
    Domain,
    /// A numerical procedure failed even after the precision retry.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient overflow in {0}")]
    Overflow(&'static str),

    #[error("zero form is not a valid operand")]
    ZeroForm,

    #[error("form is not divisible: relative residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotDivisible { residual: f64, tol: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u64, cap: u64 },

    #[error("both homogeneous coordinates of the image vanish")]
    IndeterminatePoint,

    #[error("points do not form a cycle: step {step} misses by {miss:.3e}")]
    CycleBroken { step: usize, miss: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("orbit matching failed: {0}")]
    OrbitMatchFailed(String),

    #[error("point is not periodic within {cap} iterations")]
    NotPeriodic { cap: usize },

    #[error("superattracting at period {period}")]
    Superattracting { period: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("singular curve: discriminant magnitude {0:.3e}")]
    SingularCurve(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Overflow(_)
            | Error::NotDivisible { .. }
            | Error::CycleBroken { .. }
            | Error::NoConvergence { .. }
            | Error::OrbitMatchFailed(_)
            | Error::IndeterminatePoint => ErrorClass::Numerical,
            Error::ZeroForm
            | Error::Degenerate(_)
            | Error::DegreeCap { .. }
            | Error::NotPeriodic { .. }
            | Error::Superattracting { .. }
            | Error::ShapeMismatch(_)
            | Error::SingularCurve(_)
            | Error::InvalidArgument(_) => ErrorClass::Domain,
        }
    }

    /// Stable identifier of the error kind, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Overflow(_) => "Overflow",
            Error::ZeroForm => "ZeroForm",
            Error::NotDivisible { .. } => "NotDivisible",
            Error::Degenerate(_) => "Degenerate",
            Error::DegreeCap { .. } => "DegreeCap",
            Error::IndeterminatePoint => "IndeterminatePoint",
            Error::CycleBroken { .. } => "CycleBroken",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::OrbitMatchFailed(_) => "OrbitMatchFailed",
            Error::NotPeriodic { .. } => "NotPeriodic",
            Error::Superattracting { .. } => "Superattracting",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::SingularCurve(_) => "SingularCurve",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Whether recomputing at extended precision can plausibly help.
    pub fn is_precision_artifact(&self) -> bool {
        self.class() == ErrorClass::Numerical
    }
}
