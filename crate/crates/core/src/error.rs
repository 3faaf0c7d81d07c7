use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mode index {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("eigenvalues are not negation-symmetric (worst mismatch {residual:e})")]
    PairingFailure { residual: f64 },

    #[error("defective dynamical matrix (exceptional point) at eigenvalue {eigenvalue}")]
    Defective { eigenvalue: Complex64 },

    #[error("Fock basis dimension {dim} exceeds the limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },

    #[error("cutoff {cutoff} exceeds the maximum {max} allowed for {what}")]
    CutoffTooLarge { what: &'static str, cutoff: usize, max: usize },

    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),

    #[error("cutoff {cutoff} is below the adequacy bound {required}")]
    InadequateCutoff { cutoff: usize, required: usize },

    #[error("{what} is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { what: &'static str, condition: f64 },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("singular linear system in {0}")]
    Singular(&'static str),

    #[error("expected a Hermitian quadratic form: {0}")]
    NonHermitian(String),

    #[error("quadratic form is dynamically or thermodynamically unstable near eigenvalue {eigenvalue}")]
    Unstable { eigenvalue: Complex64 },

    #[error("covariance matrix is unphysical (min eigenvalue of cov + iJ/2 is {min_eigenvalue:e})")]
    Unphysical { min_eigenvalue: f64 },

    #[error("no normalizable steady state: spectral abscissa of the moment dynamics is {abscissa:e} > 0")]
    NoNormalizableSteadyState { abscissa: f64 },

    #[error("wrong dissipation channel: {0}")]
    WrongChannel(String),

    #[error("operator does not conserve excitation number in the requested frame (term {term})")]
    NotExcitationConserving { term: String },

    #[error("cycle uses a missing edge {from} -> {to}")]
    MissingEdge { from: usize, to: usize },

    #[error("polynomial is not a quadratic form: {0}")]
    NotQuadratic(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cutoff sweep did not converge: {0}")]
    NotConverged(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
