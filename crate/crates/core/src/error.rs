use thiserror::Error;

pub type Result<T> = std::result::Result<T, RadError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadError {
    #[error("Péclet number {0} outside the supported range (-2, 10]")]
    InvalidPeclet(f64),
    #[error("tolerance {tol} is below four machine epsilons of the bracket width ({min})")]
    ToleranceTooSmall { tol: f64, min: f64 },
    #[error("index {index} out of range 1..={count}")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("time {t} is below the series floor {floor}")]
    TimeTooSmall { t: f64, floor: f64 },
    #[error("eigenbasis built for Pe = {basis} but parameters give Pe = {params}")]
    BasisMismatch { basis: f64, params: f64 },
    #[error("operation needs at least {needed} eigenvalues, basis has {available}")]
    BasisTooSmall { needed: usize, available: usize },
    #[error("moment order {0} exceeds the supported maximum of 6")]
    OrderTooHigh(usize),
    #[error("no sign change of J' found in [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },
    #[error("two-term peak time undefined: log argument {0} does not give a positive time")]
    DegenerateRatio(f64),
    #[error("operation requires k = 0 (pure transport), got k = {0}")]
    RequiresPureTransport(f64),
    #[error("curves are not sampled on the same time grid")]
    GridMismatch,
    #[error("baseline curve is not positive at t = {0}")]
    NonPositiveBaseline(f64),
    #[error("fit window holds {0} usable points, at least 3 are needed")]
    WindowTooNarrow(usize),
    #[error("observed moment ratio {observed} has no matching Péclet number in [{lo}, {hi}]")]
    OutOfRange { observed: f64, lo: f64, hi: f64 },
    #[error("M0 deviates from a by {0:.3e} (relative); data is not pure transport")]
    NotPureTransport(f64),
    #[error("finite-difference step-halving error {0:.3e} exceeds 1e-2")]
    UnstableConfig(f64),
    #[error("{censored} of {total} Monte Carlo paths hit the time cap")]
    TooManyCensored { censored: usize, total: usize },
    #[error("curves do not overlap on the requested window")]
    DisjointWindows,
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("malformed CSV at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl RadError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        RadError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            RadError::InvalidPeclet(_)
                | RadError::ToleranceTooSmall { .. }
                | RadError::IndexOutOfRange { .. }
                | RadError::InvalidParameter { .. }
                | RadError::TimeTooSmall { .. }
                | RadError::BasisMismatch { .. }
                | RadError::BasisTooSmall { .. }
                | RadError::OrderTooHigh(_)
                | RadError::RequiresPureTransport(_)
                | RadError::GridMismatch
                | RadError::WindowTooNarrow(_)
                | RadError::InvalidCurve(_)
                | RadError::Parse { .. }
        )
    }
}
