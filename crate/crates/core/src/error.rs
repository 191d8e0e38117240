use thiserror::Error;

/// Failures raised by the numerical and geometric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("non-finite value {value} at {location}")]
    NumericalDomain { location: String, value: f64 },

    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol} (estimate {est})")]
    QuadratureNotConverged { a: f64, b: f64, tol: f64, est: f64 },

    #[error("radius {0} is singular for this quantity")]
    SingularRadius(f64),

    #[error("point is off the hyperboloid (arccosh argument {0})")]
    OffHyperboloid(f64),

    #[error("radial gradient undefined at distance {0} from the pole")]
    PoleSingularity(f64),

    #[error("degenerate immersion at ({u}, {v}): det g = {det}")]
    DegenerateImmersion { u: f64, v: f64, det: f64 },

    #[error("degenerate triangle {index} (area {area})")]
    DegenerateCell { index: usize, area: f64 },

    #[error("comparison space build failed: {0}")]
    Build(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("extrinsic ball at t = {0} is empty")]
    EmptyBall(f64),

    #[error("inconsistent topology: {0}")]
    Topology(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("complex file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, GeomError>;
