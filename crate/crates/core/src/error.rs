use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised while constructing or verifying geometric objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("step-size control failed at t = {t} (step {step:e})")]
    StepSizeUnderflow { t: f64, step: f64 },

    #[error("step limit of {max_steps} reached at t = {t}")]
    StepLimit { t: f64, max_steps: usize },

    #[error("radius of component {component} collapsed to {radius:e} at t = {t}")]
    SingularRadius { t: f64, component: usize, radius: f64 },

    #[error("quadrature on [{a}, {b}] did not converge (error estimate {estimate:e})")]
    QuadratureNonConvergence { a: f64, b: f64, estimate: f64 },

    #[error("equality case: cos^2(nu) is constant, the radii are periodic with any period")]
    EqualityCase,

    #[error("critical-radius inequality violated: no root of the turning-point equation in [0, 1]")]
    InequalityViolated,

    #[error("period cross-check failed: quadrature {quadrature}, event detection {events}")]
    PeriodMismatch { quadrature: f64, events: f64 },

    #[error("vertex singularity: gamma_c is undefined at c = 0, s = 0")]
    VertexSingularity,

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("frame is not orthonormal (deviation {deviation:e})")]
    FrameNotOrthonormal { deviation: f64 },

    #[error("frame determinant has modulus {modulus}, expected 1")]
    NonUnitaryFrame { modulus: f64 },

    #[error("singular point: component {component} vanishes at grid index ({i}, {j})")]
    ZeroComponent { i: usize, j: usize, component: usize },

    #[error("exponent mismatch: {0}")]
    ExponentMismatch(String),

    #[error("degenerate metric (EG - F^2 = {value:e}) at grid index ({i}, {j})")]
    DegenerateMetric { i: usize, j: usize, value: f64 },

    #[error("tangent index {index} out of range for a {dim}-dimensional domain")]
    TangentIndex { index: usize, dim: usize },

    #[error("factor map `{name}` is not Legendrian (residual {residual:e})")]
    NotLegendrian { name: String, residual: f64 },

    #[error("solver did not converge after {iterations} iterations (max residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("singular linear system (pivot {pivot:e} at row {row})")]
    SingularMatrix { row: usize, pivot: f64 },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
