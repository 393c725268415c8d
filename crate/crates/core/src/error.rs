use thiserror::Error;

/// Every failure the library can report.
///
/// Each variant maps to a stable short code (see [`Error::code`]) which the
/// command-line driver prints alongside the message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("characteristic {0} is not supported (need p >= 5 or 0)")]
    UnsupportedCharacteristic(u64),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus {0} is too large for single-word residues")]
    ModulusTooLarge(u64),
    #[error("operation needs a finite field")]
    InfiniteField,
    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: String, found: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("coordinate change is singular")]
    SingularChange,
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("vectors do not span a line")]
    NotALine,
    #[error("line is not contained in the cubic")]
    LineNotOnCubic,
    #[error("point is not on the cubic")]
    PointNotOnCubic,
    #[error("point is not on the line")]
    PointNotOnLine,
    #[error("the cubic is singular at the point")]
    SingularPoint,
    #[error("the binary quadrics along the line have rank {0} (the cubic is singular along the line)")]
    DegenerateAlongLine(usize),
    #[error("pencil eigenvalues need a square root of {discriminant}, which is not in {field}")]
    PencilNotSplit { discriminant: String, field: String },
    #[error("the pencil has a base point")]
    BasePointPencil,
    #[error("normal form obstruction: {0}")]
    NormalFormObstruction(String),
    #[error("wrong line type: expected {expected}")]
    WrongType { expected: &'static str },
    #[error("ambient dimension {n} is too small (need n >= {min})")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("chart coordinate {chart} of the point is not normalized to 1")]
    WrongChart { chart: String },
    #[error("polynomial is not divisible by the blow-up parameter")]
    DivisionFailure,
    #[error("the fiber is empty")]
    EmptyFiber,
    #[error("the two lines are equal")]
    LinesEqual,
    #[error("the two lines are disjoint")]
    LinesDisjoint,
    #[error("bad subspace: {0}")]
    BadSubspace(String),
    #[error("the cubic surface is not singular along the line")]
    NotSingularAlongLine,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("monomial of degree {degree} in a cubic descriptor")]
    NonHomogeneous { degree: u32 },
    #[error("bad characteristic: {0}")]
    BadCharacteristic(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier used in reports and by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroInverse => "E_ZERO_INVERSE",
            Error::UnsupportedCharacteristic(_) => "E_CHARACTERISTIC",
            Error::NotPrime(_) => "E_NOT_PRIME",
            Error::ModulusTooLarge(_) => "E_MODULUS",
            Error::InfiniteField => "E_INFINITE_FIELD",
            Error::FieldMismatch { .. } => "E_FIELD_MISMATCH",
            Error::ShapeMismatch(_) => "E_SHAPE",
            Error::SingularChange => "E_SINGULAR_CHANGE",
            Error::ZeroVector => "E_ZERO_VECTOR",
            Error::NotALine => "E_NOT_A_LINE",
            Error::LineNotOnCubic => "E_LINE_NOT_ON_CUBIC",
            Error::PointNotOnCubic => "E_POINT_NOT_ON_CUBIC",
            Error::PointNotOnLine => "E_POINT_NOT_ON_LINE",
            Error::SingularPoint => "E_SINGULAR_POINT",
            Error::DegenerateAlongLine(_) => "E_DEGENERATE_ALONG_LINE",
            Error::PencilNotSplit { .. } => "E_PENCIL_NOT_SPLIT",
            Error::BasePointPencil => "E_BASE_POINT_PENCIL",
            Error::NormalFormObstruction(_) => "E_NORMAL_FORM_OBSTRUCTION",
            Error::WrongType { .. } => "E_WRONG_TYPE",
            Error::DimensionTooSmall { .. } => "E_DIMENSION",
            Error::WrongChart { .. } => "E_WRONG_CHART",
            Error::DivisionFailure => "E_DIVISION",
            Error::EmptyFiber => "E_EMPTY_FIBER",
            Error::LinesEqual => "E_LINES_EQUAL",
            Error::LinesDisjoint => "E_LINES_DISJOINT",
            Error::BadSubspace(_) => "E_BAD_SUBSPACE",
            Error::NotSingularAlongLine => "E_NOT_SINGULAR_ALONG_LINE",
            Error::Parse { .. } => "E_PARSE",
            Error::NonHomogeneous { .. } => "E_NON_HOMOGENEOUS",
            Error::BadCharacteristic(_) => "E_BAD_CHARACTERISTIC",
            Error::InvalidArgument(_) => "E_INVALID_ARGUMENT",
        }
    }

    /// True for errors caused by malformed or unsupported input, including
    /// cubics that turn out to be singular.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::NonHomogeneous { .. }
                | Error::BadCharacteristic(_)
                | Error::UnsupportedCharacteristic(_)
                | Error::NotPrime(_)
                | Error::ModulusTooLarge(_)
                | Error::InvalidArgument(_)
                | Error::InfiniteField
                | Error::FieldMismatch { .. }
                | Error::DimensionTooSmall { .. }
                | Error::ShapeMismatch(_)
                | Error::SingularPoint
                | Error::DegenerateAlongLine(_)
                | Error::BasePointPencil
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
