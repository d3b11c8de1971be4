use thiserror::Error;

/// Errors produced by the library.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("word is not conjugate to a boundary word")]
    NotBoundaryConjugate,

    #[error("endomorphism does not respect the kernel of m_a: {0}")]
    KernelNotRespected(String),

    #[error("endomorphism is not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("orientation violation: boundary word {index} maps to an inverted boundary word")]
    OrientationViolation { index: usize },

    #[error("{0} is not invertible modulo the given modulus")]
    NotCoprime(String),

    #[error("unknown generator symbol {0:?} for this surface")]
    UnknownSymbol(String),

    #[error("a homology pack is required for the double n-gon with n = {0}")]
    MissingPack(usize),

    #[error("invalid homology pack: relation {relation} fails")]
    InvalidPack { relation: String },

    #[error("element cap of {0} exceeded")]
    CapExceeded(usize),

    #[error("coset cap of {0} exceeded")]
    CosetCapExceeded(usize),

    #[error("invalid coset graph: {0}")]
    InvalidGraph(String),

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("element is not in the ambient group: {0}")]
    NotInAmbient(String),

    #[error("cover of degree {degree_hint} exceeds the cap")]
    CoverTooLarge { degree_hint: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("check {name:?} failed to run: {source}")]
    InCheck {
        name: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// The underlying error, looking through [`Error::InCheck`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::InCheck { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
