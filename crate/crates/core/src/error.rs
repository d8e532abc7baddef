use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants fall into two groups: input/precondition problems (the caller
/// handed us something unusable) and verified failures (a numerical check
/// that should hold did not). [`Error::is_input_error`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix or vector contains a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("columns are linearly dependent (smallest singular value {sigma_min:.3e} <= {tol:.3e})")]
    RankDeficient { sigma_min: f64, tol: f64 },

    #[error("symmetric eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("window endpoint {endpoint} is within {tol:.3e} of eigenvalue {eigenvalue}")]
    AmbiguousWindow { endpoint: f64, eigenvalue: f64, tol: f64 },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("lambda = {lambda} lies outside the domain {domain}")]
    OutOfDomain { lambda: f64, domain: String },

    #[error("lambda = {lambda} is within {margin:.3e} of the pole {pole}")]
    PoleProximity { lambda: f64, pole: f64, margin: f64 },

    #[error("invalid operator family: {0}")]
    InvalidFamily(String),

    #[error("parse error at '{pointer}': {message}")]
    Parse { pointer: String, message: String },

    #[error("matrix at '{pointer}' is not symmetric (deviation {deviation:.3e})")]
    Asymmetric { pointer: String, deviation: f64 },

    #[error("the zero vector has no Rayleigh functional value")]
    ZeroVector,

    #[error(
        "form changes sign more than once: downward crossing in [{}, {}], upward crossing in [{}, {}]",
        down.0, down.1, up.0, up.1
    )]
    A3Violation { down: (f64, f64), up: (f64, f64) },

    #[error("gamma = {gamma} is not in the resolvent set (|eigenvalue| = {min_abs:.3e} <= {tol:.3e})")]
    NotInResolvent { gamma: f64, min_abs: f64, tol: f64 },

    #[error("contraction has spectral norm {norm} > 1")]
    ContractionViolation { norm: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("vector is not an eigenvector (residual {residual:.3e} > {tol:.3e})")]
    NotEigenvector { residual: f64, tol: f64 },

    #[error("subspace is not contained in the ambient subspace (residual {residual:.3e})")]
    Containment { residual: f64 },

    #[error("index {n} out of range 1..={max}")]
    IndexOutOfRange { n: usize, max: usize },

    #[error("found {found} eigenvalues above gamma, need at least {needed}")]
    InsufficientSpectrum { found: usize, needed: usize },

    #[error("no resolvent point above the eigenvalue {0} inside the domain")]
    NoGap(f64),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// True for malformed input and unmet preconditions, false for
    /// verified failures and internal inconsistencies.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Consistency(_)
                | Error::InsufficientSpectrum { .. }
                | Error::NoGap(_)
                | Error::A3Violation { .. }
        )
    }
}
