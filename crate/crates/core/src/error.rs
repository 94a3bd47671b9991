use thiserror::Error;

/// Errors raised by the scoring engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite ratio {value} at row {row}, column {column}")]
    NonFinite { row: usize, column: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("insufficient sample: need at least {needed} values, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("L-skewness {tau3} is too close to zero; shape parameter diverges")]
    SymmetricDegenerate { tau3: f64 },

    #[error("L-skewness {tau3} outside (-1, 1)")]
    InvalidRatio { tau3: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("pooled scatter is singular; offending columns {columns:?}")]
    SingularScatter { columns: Vec<usize> },

    #[error("row {row} has no agency rating; fitting requires graded rows")]
    Ungraded { row: usize },

    #[error("industry {industry} has {n} records; at least 3 are needed for a fit")]
    TooFewRecords { industry: u32, n: usize },

    #[error("industry {industry}: {source}")]
    IndustryFit {
        industry: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("no fitted distribution for industry {0}")]
    UnknownIndustry(u32),

    #[error("invalid threshold table: {0}")]
    InvalidThresholds(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerical fitting stages, as opposed to
    /// malformed input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Degenerate(_)
            | Error::SymmetricDegenerate { .. }
            | Error::InvalidRatio { .. }
            | Error::Fit(_)
            | Error::SingularScatter { .. }
            | Error::TooFewRecords { .. }
            | Error::InsufficientSample { .. } => true,
            Error::IndustryFit { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
