use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input.
    #[error("{0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Invalid(_) => 2,
            Self::Internal(_) => 1,
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Self::Invalid(e.to_string())
            }
        })*
    };
}

invalid_from!(
    dagcut_core::DagError,
    dagcut_core::gd::GdError,
    dagcut_core::knitting::KnitError,
    dagcut_core::reductions::ReductionError,
    dagcut_core::simverify::SimError,
    serde_json::Error
);
