use thiserror::Error;

/// Failures reported by the jet engine and the normal-form pipelines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("map does not fix the origin")]
    NonOriginPreserving,
    #[error("linear part is singular")]
    SingularLinearPart,
    #[error("derivative along {0} vanishes at the origin")]
    DegenerateDirection(String),
    #[error("vector field vanishes at the origin")]
    SingularAtOrigin,
    #[error("2-form is degenerate at the origin: {0}")]
    DegenerateForm(String),
    #[error("2-form is not closed")]
    NotClosed,
    #[error("transversality fails: {0}")]
    TransversalityFailure(String),
    #[error("no admissible renumeration: {0}")]
    PivotFailure(String),
    #[error("pair is not in class S1: {0}")]
    NotGlancing(String),
    #[error("genericity fails: {0}")]
    GenericityViolation(String),
    #[error("certification failed: {0}")]
    CertificationFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SpaceMismatch(_) => "SpaceMismatch",
            Error::NonOriginPreserving => "NonOriginPreserving",
            Error::SingularLinearPart => "SingularLinearPart",
            Error::DegenerateDirection(_) => "DegenerateDirection",
            Error::SingularAtOrigin => "SingularAtOrigin",
            Error::DegenerateForm(_) => "DegenerateForm",
            Error::NotClosed => "NotClosed",
            Error::TransversalityFailure(_) => "TransversalityFailure",
            Error::PivotFailure(_) => "PivotFailure",
            Error::NotGlancing(_) => "NotGlancing",
            Error::GenericityViolation(_) => "GenericityViolation",
            Error::CertificationFailure(_) => "CertificationFailure",
            Error::Parse(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
