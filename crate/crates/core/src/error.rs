use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: need a < b with finite endpoints")]
    InvalidInterval { a: f64, b: f64 },

    #[error("node count must be at least 1")]
    ZeroNodes,

    #[error("measure weights must be finite and strictly positive (index {index}: {weight})")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("scalar field mismatch: {left} vs {right}")]
    FieldMismatch { left: &'static str, right: &'static str },

    #[error("families live on different measure spaces")]
    MeasureMismatch,

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("operator is not self-adjoint (relative defect {defect:e})")]
    NotSelfAdjoint { defect: f64 },

    #[error("operator is not positive definite (minimum Hermitian eigenvalue {min_eig:e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("operator is numerically singular (condition number {condition:e})")]
    SingularOperator { condition: f64 },

    #[error("invalid factorization spec: {0}")]
    BadSpec(String),

    #[error("family is not orthonormal (Gram defect {defect:e})")]
    NotOrthonormal { defect: f64 },

    #[error("operation requires a counting measure")]
    NotCounting,

    #[error("family has {nodes} members but the space has dimension {dimension}")]
    SizeMismatch { nodes: usize, dimension: usize },

    #[error("Hermitian eigensolver failed to converge")]
    EigenFailure,

    #[error("singular value decomposition failed to converge")]
    SvdFailure,
}

impl Error {
    /// Solver breakdowns, as opposed to domain outcomes such as a singular operator.
    pub fn is_numerical_failure(&self) -> bool {
        matches!(self, Error::EigenFailure | Error::SvdFailure | Error::NonFinite)
    }

    /// Stable snake_case identifier used in reports and scenario expectations.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInterval { .. } => "invalid_interval",
            Error::ZeroNodes => "zero_nodes",
            Error::NonPositiveWeight { .. } => "non_positive_weight",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::FieldMismatch { .. } => "field_mismatch",
            Error::MeasureMismatch => "measure_mismatch",
            Error::NonFinite => "non_finite",
            Error::NotSelfAdjoint { .. } => "not_self_adjoint",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::SingularOperator { .. } => "singular_operator",
            Error::BadSpec(_) => "bad_spec",
            Error::NotOrthonormal { .. } => "not_orthonormal",
            Error::NotCounting => "not_counting",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::EigenFailure => "eigen_failure",
            Error::SvdFailure => "svd_failure",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
