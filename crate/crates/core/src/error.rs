use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the library.
///
/// Variants fall in two families that callers (notably the CLI) treat
/// differently: input validation, and numerical failure. See
/// [`Error::is_validation`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(usize),

    #[error("expected {expected} branch parameters for genus {genus}, got {got}")]
    WrongParamCount {
        genus: usize,
        expected: usize,
        got: usize,
    },

    #[error("branch parameter a{index} = {value} is not finite")]
    NonFinite { index: usize, value: f64 },

    #[error("branch parameter a{index} = {value} must satisfy a{index} > 1 (a{index} <= 1)")]
    NotAboveOne { index: usize, value: f64 },

    #[error("branch parameters must be strictly increasing: a{index} = {value} <= a{prev_index} = {prev}")]
    NotIncreasing {
        index: usize,
        value: f64,
        prev_index: usize,
        prev: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("[{lo}, {hi}] is not an interval between consecutive branch points")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("power index j = {j} outside 1..={genus}")]
    InvalidPower { j: usize, genus: usize },

    #[error("integral for entry (j={j}, k={k}) did not converge: error estimate {estimate:e} after {nodes} nodes")]
    EntryNotConverged {
        j: usize,
        k: usize,
        estimate: f64,
        nodes: usize,
    },

    #[error("integral over interval {interval} did not converge: error estimate {estimate:e} after {nodes} nodes")]
    IntervalNotConverged {
        interval: usize,
        estimate: f64,
        nodes: usize,
    },

    #[error(
        "matrix is numerically singular (condition estimate {condition:e}); try extended precision"
    )]
    Singular { condition: f64 },

    #[error("genus-2 closed form is degenerate: |ps - qr| = {0:e}")]
    DegenerateClosedForm(f64),

    #[error("closed form requires genus 2, got {0}")]
    NotGenusTwo(usize),

    #[error("rectangle {label} has nonpositive {dimension} {value:e}")]
    NonPositiveDimension {
        label: String,
        dimension: &'static str,
        value: f64,
    },

    #[error("invalid moduli target: {0}")]
    InvalidTarget(String),

    #[error("inverse solver exceeded {iterations} iterations (residual {residual:e})")]
    MaxIterations {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("inverse solver hit a numerically singular Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize, trace: Vec<f64> },

    #[error("target appears infeasible: residual stopped decreasing at {residual:e} (iteration {iteration})")]
    Infeasible {
        iteration: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("malformed matrix CSV: {0}")]
    Csv(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::GenusTooSmall(_)
                | Error::WrongParamCount { .. }
                | Error::NonFinite { .. }
                | Error::NotAboveOne { .. }
                | Error::NotIncreasing { .. }
                | Error::InvalidConfig(_)
                | Error::InvalidInterval { .. }
                | Error::InvalidPower { .. }
                | Error::NotGenusTwo(_)
                | Error::InvalidTarget(_)
                | Error::Csv(_)
        )
    }

    /// Residual trace of a failed inverse solve, if any.
    pub fn trace(&self) -> Option<&[f64]> {
        match self {
            Error::MaxIterations { trace, .. }
            | Error::SingularJacobian { trace, .. }
            | Error::Infeasible { trace, .. } => Some(trace),
            _ => None,
        }
    }
}
