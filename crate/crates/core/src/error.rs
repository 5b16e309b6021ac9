use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point out of chart domain: {0}")]
    OutOfDomain(String),
    #[error("radius inside the horizon: {0}")]
    HorizonViolation(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),
    #[error("singular metric (Cholesky pivot {pivot:e})")]
    SingularMetric { pivot: f64 },
    #[error("unsupported dimension n = {0}")]
    BadDimension(usize),
    #[error("bad grid resolution {0} (need >= 8)")]
    BadResolution(usize),
    #[error("induced metric not positive definite at node {node}")]
    EigFailure { node: usize },
    #[error("non-finite integrand at node {node}")]
    NonFiniteIntegrand { node: usize },
    #[error("surface is not round (defect {defect:e} > tolerance {tol:e})")]
    NotRound { defect: f64, tol: f64 },
    #[error("{estimator} requires a {required} chart")]
    WrongChart {
        estimator: String,
        required: &'static str,
    },
    #[error("surface family {family} is not available in the {chart} chart")]
    WrongFamily { family: String, chart: &'static str },
    #[error("decay rate tau = {tau} too weak for {estimator} (needs tau > {needed})")]
    DecayTooWeak {
        estimator: String,
        tau: f64,
        needed: f64,
    },
    #[error("values already converged (limit {limit})")]
    DegenerateFit { limit: f64 },
    #[error("fit failed: {0}")]
    FitFailure(String),
    #[error("bad exponent p = {0} (must be > 0)")]
    BadExponent(f64),
    #[error("repeated abscissa rho = {0}")]
    RepeatedAbscissa(f64),
    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),
    #[error("at rho = {rho}: {source}")]
    AtRadius {
        rho: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
