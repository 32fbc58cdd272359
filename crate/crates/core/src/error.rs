use thiserror::Error;

/// Errors produced by graph construction, chain setup and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot construct graph: {0}")]
    Construction(String),

    #[error("graph is not regular (degrees: {degrees:?})")]
    Regularity { degrees: Vec<usize> },

    #[error("graph is not connected ({components} components)")]
    Connectivity { components: usize },

    #[error("graph is not simple: {0}")]
    NotSimple(String),

    #[error("intensity of selection w = {w} violates the fitness positivity bound w_max = {w_max}")]
    WMaxViolation { w: f64, w_max: f64 },

    #[error("unsupported payoff matrix: {0}")]
    UnsupportedPayoff(String),

    #[error("state space too large: N = {n} exceeds the exact-solver limit {max}")]
    TooLarge { n: usize, max: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("b/c sits exactly at the critical ratio; no critical size exists")]
    CriticalRatio,

    #[error("all {replicas} replicas were censored; no estimate available")]
    EstimateUnavailable { replicas: u64 },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by inputs outside the model's domain, as opposed
    /// to internal consistency failures.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
