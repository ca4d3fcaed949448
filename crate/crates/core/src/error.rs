use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the geometry, coefficient, mesh, assembly and solver layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("degenerate edge {0} (length below 1e-12)")]
    DegenerateEdge(usize),
    #[error("interior facet: centroid is not on the cylinder boundary")]
    InteriorFacet,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("function `{name}` takes {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("division by zero while evaluating an expression")]
    DivisionByZero,
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("coefficient is not symmetric: entry ({row},{col}) differs from its transpose by {difference:e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        difference: f64,
    },
    #[error("not elliptic on sample grid (smallest eigenvalue {0:e})")]
    NotElliptic(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not orthogonal (max |BᵀB - I| = {0:e})")]
    NotOrthogonal(f64),
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("element {0} has nonpositive measure")]
    NonPositiveMeasure(usize),
    #[error("matrix not positive definite at pivot {0}")]
    NotPositiveDefinite(usize),
    #[error("zero vector")]
    ZeroVector,
    #[error("requested {k} eigenpairs from a problem with {n} unknowns")]
    TooFewUnknowns { k: usize, n: usize },
    #[error("eigensolver did not converge after {iterations} iterations (best residuals {residuals:?})")]
    NoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },
    #[error("dense oracle is limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("monotonicity violated: value rose from {previous} to {current} at parameter {parameter}")]
    MonotonicityViolated {
        parameter: f64,
        previous: f64,
        current: f64,
    },
    #[error("decay lemma hypotheses not met: the gap condition does not hold")]
    DecayHypotheses,
    #[error("support does not fit: {0}")]
    SupportDoesNotFit(String),
    #[error("{dofs} unknowns exceed the configured cap of {cap}")]
    DofCap { dofs: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
