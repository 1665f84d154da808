use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SfnError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside the domain of {operation}: {detail}")]
    Domain { operation: &'static str, detail: String },

    #[error("every SFN station transmits with zero power")]
    AllPowersZero,

    #[error("numerical instability in {context}: raw value {value}")]
    NumericalInstability { context: &'static str, value: f64 },

    #[error("power allocation infeasible: outage {outage_at_max} at full power exceeds target {target}")]
    Infeasible { outage_at_max: f64, target: f64 },

    #[error("scenario file: {0}")]
    Config(String),
}

impl SfnError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        SfnError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(operation: &'static str, detail: impl Into<String>) -> Self {
        SfnError::Domain {
            operation,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = SfnError> = std::result::Result<T, E>;
