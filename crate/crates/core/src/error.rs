use thiserror::Error;

/// Errors raised by the form, subspace and lagrangian operations.
///
/// Variant names are part of the CLI report format (see [`Error::name`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix violates the declared symmetry sign (residual {residual:e})")]
    SymmetryViolation { residual: f64 },

    #[error("symmetry signs differ")]
    EpsilonMismatch,

    #[error("signature is only defined for symmetric forms")]
    SkewSignature,

    #[error("form is degenerate")]
    DegenerateForm,

    #[error("ambient dimension {0} is odd")]
    OddDimension(usize),

    #[error("lagrangian must have dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("subspace is not isotropic (residual {residual:e})")]
    NotIsotropic { residual: f64 },

    #[error("lagrangians live in different spaces")]
    SpaceMismatch,

    #[error("operation requires the standard hyperbolic space")]
    NotStandardSpace,

    #[error("lagrangian meets the second hyperbolic factor")]
    NotTransversalToLstar,

    #[error("lagrangians are not transversal")]
    NotTransversal,

    #[error("matrix is not invertible")]
    NotInvertible,

    #[error("triple is not pairwise transversal")]
    NotTransversalTriple,

    #[error("sampling too coarse at step {step}: increment {increment:.6} exceeds {limit:.6}")]
    SamplingTooCoarse {
        step: usize,
        increment: f64,
        limit: f64,
    },

    #[error("loop is not closed")]
    NotClosed,

    #[error("loop endpoints do not match")]
    EndpointMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable variant name, used as the error tag in machine-readable reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "NonSquare",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SymmetryViolation { .. } => "SymmetryViolation",
            Error::EpsilonMismatch => "EpsilonMismatch",
            Error::SkewSignature => "SkewSignature",
            Error::DegenerateForm => "DegenerateForm",
            Error::OddDimension(_) => "OddDimension",
            Error::WrongDimension { .. } => "WrongDimension",
            Error::NotIsotropic { .. } => "NotIsotropic",
            Error::SpaceMismatch => "SpaceMismatch",
            Error::NotStandardSpace => "NotStandardSpace",
            Error::NotTransversalToLstar => "NotTransversalToLstar",
            Error::NotTransversal => "NotTransversal",
            Error::NotInvertible => "NotInvertible",
            Error::NotTransversalTriple => "NotTransversalTriple",
            Error::SamplingTooCoarse { .. } => "SamplingTooCoarse",
            Error::NotClosed => "NotClosed",
            Error::EndpointMismatch => "EndpointMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
