use thiserror::Error;

/// Broad failure classes, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Numeric,
    Config,
    Budget,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("frequency real part vanishes ({which}); excluded before the ratio test")]
    VanishingRealPart { which: &'static str },

    #[error("degenerate frequencies: {0}")]
    DegenerateFrequency(String),

    #[error("index nu = (0,0) has no denominator")]
    ZeroIndex,

    #[error("weighted integrand overflows at sigma = {sigma}")]
    Overflow { sigma: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("cost budget exceeded: {what} needs {needed}, budget {budget}")]
    Budget {
        what: &'static str,
        needed: u64,
        budget: u64,
    },

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("lattice point {point:?} lies inside the contaminated boundary shell (depth {depth}, n_max {n_max})")]
    Contamination {
        point: [usize; 2],
        depth: usize,
        n_max: usize,
    },

    #[error("hbar = 0 is not accepted on the operator path; use the classical oracle")]
    ZeroHbar,

    #[error("series did not converge: {0}")]
    NonConvergence(String),

    #[error("eigenvalue tracking ambiguous for labels {labels:?} at eps = {epsilon}")]
    TrackingAmbiguity { labels: Vec<[usize; 2]>, epsilon: f64 },

    #[error("resonant monomial with <omega,nu> = 0 at nu = {nu:?}")]
    Resonant { nu: [i64; 2] },

    #[error("quadrature error {estimate:e} above tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParams(_) | Error::VanishingRealPart { .. } => ErrorClass::Config,
            Error::Budget { .. } | Error::Truncation(_) | Error::Contamination { .. } => {
                ErrorClass::Budget
            }
            _ => ErrorClass::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
