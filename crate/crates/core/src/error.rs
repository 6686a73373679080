use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("matrix is not unitary (max |U†U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: String,
    },

    #[error("integrator misconfigured: {0}")]
    Integrator(String),

    #[error("finite-difference step {step:e} underflows at this point")]
    StepUnderflow { step: f64 },

    #[error("fixed-stake walk did not terminate within {cap} plays")]
    RunawayWalk { cap: u64 },

    #[error("double-or-nothing game exceeded {cap} plays; the coin source is defective")]
    PlayCapExceeded { cap: u64 },

    #[error("observed branching ratio is zero; the lower bound on epsilon is infinite")]
    InfiniteBound,
}

impl Error {
    /// Numerical failures (as opposed to rejected inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::RunawayWalk { .. }
                | Error::PlayCapExceeded { .. }
                | Error::InfiniteBound
        )
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint: "must be finite".into(),
        })
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint: "must be finite and > 0".into(),
        })
    }
}

pub(crate) fn require_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "0 <= value <= 1",
        })
    }
}
