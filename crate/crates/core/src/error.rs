use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("equation {equation} has no terms")]
    EmptyEquation { equation: usize },

    #[error("support of length {found} in equation {equation}, expected {expected}")]
    SupportLengthMismatch {
        equation: usize,
        expected: usize,
        found: usize,
    },

    #[error("coefficient shape {found:?} differs from {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("under-determined eigenvalue problem: k = {k} < l + m - 1 = {}", l + m - 1)]
    UnderDetermined { k: usize, l: usize, m: usize },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("unsupported format version {found}")]
    Version { found: String },

    #[error("index {index} out of range")]
    IndexOutOfRange { index: usize },

    #[error("count C({n}, {k}) overflows usize")]
    Overflow { n: usize, k: usize },

    #[error("degree {requested} is below the problem degree {minimum}")]
    DegreeTooSmall { requested: usize, minimum: usize },

    #[error("cannot enlarge from degree {from} to degree {to}")]
    DegreeSkip { from: usize, to: usize },

    #[error(
        "ambiguous rank decision: singular value {sigma:e} within a factor 10 of threshold {threshold:e} \
         (nearest gap {below:e} .. {above:e})"
    )]
    RankAmbiguous {
        sigma: f64,
        threshold: f64,
        above: f64,
        below: f64,
    },

    #[error("no gap zone at degree {degree}")]
    NoGap { degree: usize },

    #[error("rank structure has no gap zone")]
    GapMissing,

    #[error("shifted row {row} falls outside the affine zone of {nrows} rows")]
    ShiftEscapesSubspace { row: usize, nrows: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree cap {maxdeg} reached before the solution subspace converged")]
    DegreeCapExceeded { maxdeg: usize },

    #[error(
        "nullity did not stabilize up to degree {maxdeg}; the affine solution set is likely \
         positive-dimensional (use --posdim if only the part at infinity is)"
    )]
    PositiveDimensionalAffine { maxdeg: usize },

    #[error("unknown problem '{0}'")]
    UnknownProblem(String),

    #[error("problem row {row} failed for every solver")]
    AllFailRow { row: usize },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("invalid option: {0}")]
    InvalidOption(String),
}

impl Error {
    /// Stable identifier used on the command line and in diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyEquation { .. } => "EmptyEquation",
            Error::SupportLengthMismatch { .. } => "SupportLengthMismatch",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::UnderDetermined { .. } => "UnderDetermined",
            Error::Format { .. } => "FormatError",
            Error::Version { .. } => "VersionError",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::Overflow { .. } => "Overflow",
            Error::DegreeTooSmall { .. } => "DegreeTooSmall",
            Error::DegreeSkip { .. } => "DegreeSkip",
            Error::RankAmbiguous { .. } => "RankAmbiguous",
            Error::NoGap { .. } => "NoGap",
            Error::GapMissing => "GapMissing",
            Error::ShiftEscapesSubspace { .. } => "ShiftEscapesSubspace",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::DegreeCapExceeded { .. } => "DegreeCapExceeded",
            Error::PositiveDimensionalAffine { .. } => "PositiveDimensionalAffine",
            Error::UnknownProblem(_) => "UnknownProblem",
            Error::AllFailRow { .. } => "AllFailRow",
            Error::Linalg(_) => "LinalgError",
            Error::InvalidOption(_) => "InvalidOption",
        }
    }
}
