use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// [`Error::is_input_error`] separates malformed input from a mathematical
/// verification that failed on well-formed input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("generators do not define a module: {0}")]
    NotModule(String),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("form is not symmetric: {0}")]
    NonSymmetricForm(String),
    #[error("form is not skew-symmetric: {0}")]
    NonSkewForm(String),
    #[error("form is not unimodular: det = {0}")]
    NonUnimodularForm(String),
    #[error("spectral data is not regular: {0}")]
    NotRegular(String),
    #[error("{0} does not split over the coefficient field")]
    NotSplit(String),
    #[error("no square root of {0} in the coefficient field")]
    NotSplitScalar(String),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("determinant mismatch: {0}")]
    DeterminantMismatch(String),
    #[error("gamma_plus is not an isomorphism: det = {0}")]
    GammaPlusNotIso(String),
    #[error("involution type mismatch: {0}")]
    TypeMismatch(String),
    #[error("indecomposable model not supported: {0}")]
    Indecomposable(String),
    #[error("kernel condition violated at x = {x}: beta_F(x) i_x = {image}")]
    KernelViolation { x: String, image: String },
    #[error("isometry condition violated at x = {x}: Q_W(i_x, i_x) = {lhs}, a_(p-1)(x) = {rhs}")]
    IsometryViolation { x: String, lhs: String, rhs: String },
    #[error("internal holomorphy failure: {0}")]
    InternalHolomorphyFailure(String),
    #[error("model unsupported: {0}")]
    ModelUnsupported(String),
    #[error("parity error: b_plus - b_minus = {0} is odd")]
    ParityError(i64),
    #[error("census range violated: {0}")]
    CensusRange(String),
    #[error("rank rule: {0}")]
    RankRule(String),
    #[error("first Stiefel-Whitney classes differ")]
    FirstClassMismatch,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for malformed or out-of-contract input, false for failed mathematics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Schema(_)
                | Error::ShapeMismatch(_)
                | Error::DimensionMismatch(_)
                | Error::NotSquare(..)
                | Error::Unsupported(_)
                | Error::ModelUnsupported(_)
                | Error::Indecomposable(_)
        )
    }

    /// Short stable name used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Schema(_) => "Schema",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::NotModule(_) => "NotModule",
            Error::NotSquare(..) => "NotSquare",
            Error::NonSymmetricForm(_) => "NonSymmetricForm",
            Error::NonSkewForm(_) => "NonSkewForm",
            Error::NonUnimodularForm(_) => "NonUnimodularForm",
            Error::NotRegular(_) => "NotRegular",
            Error::NotSplit(_) => "NotSplit",
            Error::NotSplitScalar(_) => "NotSplitScalar",
            Error::RankMismatch { .. } => "RankMismatch",
            Error::DeterminantMismatch(_) => "DeterminantMismatch",
            Error::GammaPlusNotIso(_) => "GammaPlusNotIso",
            Error::TypeMismatch(_) => "TypeMismatch",
            Error::Indecomposable(_) => "Indecomposable",
            Error::KernelViolation { .. } => "KernelViolation",
            Error::IsometryViolation { .. } => "IsometryViolation",
            Error::InternalHolomorphyFailure(_) => "InternalHolomorphyFailure",
            Error::ModelUnsupported(_) => "ModelUnsupported",
            Error::ParityError(_) => "ParityError",
            Error::CensusRange(_) => "CensusRange",
            Error::RankRule(_) => "RankRule",
            Error::FirstClassMismatch => "FirstClassMismatch",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}
