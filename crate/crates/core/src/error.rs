use std::fmt;

use thiserror::Error;

/// Why a spectral decomposition was refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumIssue {
    Repeated,
    Complex,
}

impl fmt::Display for SpectrumIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumIssue::Repeated => f.write_str("repeated eigenvalues"),
            SpectrumIssue::Complex => f.write_str("complex spectrum"),
        }
    }
}

/// Failure while reading one of the text formats. Lines are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: unknown header {found:?}")]
    UnknownHeader { line: usize, found: String },
    #[error("line {line}: malformed scalar {token:?}")]
    MalformedScalar { line: usize, token: String },
    #[error("line {line}: modulus {modulus} is not prime")]
    NonPrimeModulus { line: usize, modulus: String },
    #[error("line {line}: {detail}")]
    ShapeError { line: usize, detail: String },
    #[error("line {line}: component dimensions {dims:?} are not pairwise distinct")]
    StrictDimsViolation { line: usize, dims: Vec<usize> },
    #[error("line {line}: {detail}")]
    Syntax { line: usize, detail: String },
    #[error("input is not valid UTF-8")]
    NotUtf8,
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::UnknownHeader { line, .. }
            | ParseError::MalformedScalar { line, .. }
            | ParseError::NonPrimeModulus { line, .. }
            | ParseError::ShapeError { line, .. }
            | ParseError::StrictDimsViolation { line, .. }
            | ParseError::Syntax { line, .. } => Some(*line),
            ParseError::NotUtf8 => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ParseError::UnknownHeader { .. } => "UnknownHeader",
            ParseError::MalformedScalar { .. } => "MalformedScalar",
            ParseError::NonPrimeModulus { .. } => "NonPrimeModulus",
            ParseError::ShapeError { .. } => "ShapeError",
            ParseError::StrictDimsViolation { .. } => "StrictDimsViolation",
            ParseError::Syntax { .. } => "Syntax",
            ParseError::NotUtf8 => "NotUtf8",
        }
    }
}

/// Domain errors. Component indices are 0-based in the value and printed 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("the zero polynomial has no root structure")]
    ZeroPolynomial,
    #[error("at least two components are required, got {0}")]
    TooFewComponents(usize),
    #[error("group order must be positive")]
    InvalidOrder,
    #[error("{0} is not a prime modulus")]
    NonPrimeModulus(u64),
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("component field {0} appears more than once")]
    DuplicateComponent(String),
    #[error("component fields {0} and {1} are nested")]
    ContainmentViolation(String, String),
    #[error("operands live in different n-vector spaces")]
    SpaceMismatch,
    #[error("component dimensions {0:?} are not pairwise distinct")]
    NonStrictDims(Vec<usize>),
    #[error("component {component}: {detail}")]
    ShapeMismatch { component: usize, detail: String },
    #[error("component {} is not square", .0 + 1)]
    NonSquare(usize),
    #[error("component {} is singular", .0 + 1)]
    SingularComponent(usize),
    #[error("invalid component assignment: {0}")]
    InvalidAssignment(String),
    #[error("operation needs a {expected} map, found {found}")]
    KindMismatch { expected: &'static str, found: String },
    #[error("component {} of the source set is not a basis", .0 + 1)]
    NotABasis(usize),
    #[error("operation needs an ordered field (Q or R)")]
    UnorderedField,
    #[error("operation needs an exact field (Q or Z_p)")]
    ExactFieldRequired,
    #[error("component {} of the input set is linearly dependent", .0 + 1)]
    DependentInput(usize),
    #[error("component {} of the set contains a zero vector", .0 + 1)]
    ZeroVectorInSet(usize),
    #[error("component {} of the set is not pairwise orthogonal", .0 + 1)]
    NotOrthogonal(usize),
    #[error("component {} is not diagonalizable", .0 + 1)]
    NotDiagonalizable(usize),
    #[error("minimal polynomial of component {} does not split over the field", .0 + 1)]
    MinimalPolynomialDoesNotSplit(usize),
    #[error("component {}: negative entry at ({}, {})", .component + 1, .row + 1, .col + 1)]
    NegativeEntry { component: usize, row: usize, col: usize },
    #[error("component {}: line {} sums to {sum}", .component + 1, .index + 1)]
    StochasticityViolation {
        component: usize,
        index: usize,
        sum: String,
    },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("operation needs a row-stochastic chain")]
    ConventionMismatch,
    #[error("component {}: spectral decomposition refused ({reason})", .component + 1)]
    RepeatedEigenvalues { component: usize, reason: SpectrumIssue },
    #[error("component {} is not a probability vector", .0 + 1)]
    NotADistribution(usize),
    #[error("component {}: probability {value} is not in (0, 1)", .component + 1)]
    InvalidProbability { component: usize, value: String },
    #[error("component {}: not an exchange matrix ({detail})", .component + 1)]
    InvalidExchangeMatrix { component: usize, detail: String },
    #[error("component {}: not a consumption matrix ({detail})", .component + 1)]
    InvalidConsumptionMatrix { component: usize, detail: String },
    #[error("component {}: demand has a negative entry", .0 + 1)]
    NegativeDemand(usize),
    #[error("component {}: I - C is singular", .0 + 1)]
    SingularIMinusC(usize),
    #[error("component {}: production has negative entries at {entries:?}", .component + 1)]
    NegativeProduction { component: usize, entries: Vec<usize> },
    #[error("operation needs a {0} model")]
    ModelMismatch(&'static str),
}

impl Error {
    /// Stable variant name used in machine-readable reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::FieldMismatch => "FieldMismatch",
            Error::DivisionByZeroPolynomial => "DivisionByZeroPolynomial",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::TooFewComponents(_) => "TooFewComponents",
            Error::InvalidOrder => "InvalidOrder",
            Error::NonPrimeModulus(_) => "NonPrimeModulus",
            Error::InvalidTolerance(_) => "InvalidTolerance",
            Error::DuplicateComponent(_) => "DuplicateComponent",
            Error::ContainmentViolation(..) => "ContainmentViolation",
            Error::SpaceMismatch => "SpaceMismatch",
            Error::NonStrictDims(_) => "NonStrictDims",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::NonSquare(_) => "NonSquare",
            Error::SingularComponent(_) => "SingularComponent",
            Error::InvalidAssignment(_) => "InvalidAssignment",
            Error::KindMismatch { .. } => "KindMismatch",
            Error::NotABasis(_) => "NotABasis",
            Error::UnorderedField => "UnorderedField",
            Error::ExactFieldRequired => "ExactFieldRequired",
            Error::DependentInput(_) => "DependentInput",
            Error::ZeroVectorInSet(_) => "ZeroVectorInSet",
            Error::NotOrthogonal(_) => "NotOrthogonal",
            Error::NotDiagonalizable(_) => "NotDiagonalizable",
            Error::MinimalPolynomialDoesNotSplit(_) => "MinimalPolynomialDoesNotSplit",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::StochasticityViolation { .. } => "StochasticityViolation",
            Error::DimMismatch(_) => "DimMismatch",
            Error::ConventionMismatch => "ConventionMismatch",
            Error::RepeatedEigenvalues { .. } => "RepeatedEigenvalues",
            Error::NotADistribution(_) => "NotADistribution",
            Error::InvalidProbability { .. } => "InvalidProbability",
            Error::InvalidExchangeMatrix { .. } => "InvalidExchangeMatrix",
            Error::InvalidConsumptionMatrix { .. } => "InvalidConsumptionMatrix",
            Error::NegativeDemand(_) => "NegativeDemand",
            Error::SingularIMinusC(_) => "SingularIMinusC",
            Error::NegativeProduction { .. } => "NegativeProduction",
            Error::ModelMismatch(_) => "ModelMismatch",
        }
    }

    /// 0-based component the error points at, when there is one.
    pub fn component(&self) -> Option<usize> {
        match self {
            Error::NonSquare(c)
            | Error::SingularComponent(c)
            | Error::NotABasis(c)
            | Error::DependentInput(c)
            | Error::ZeroVectorInSet(c)
            | Error::NotOrthogonal(c)
            | Error::NotDiagonalizable(c)
            | Error::MinimalPolynomialDoesNotSplit(c)
            | Error::NotADistribution(c)
            | Error::NegativeDemand(c)
            | Error::SingularIMinusC(c) => Some(*c),
            Error::ShapeMismatch { component, .. }
            | Error::NegativeEntry { component, .. }
            | Error::StochasticityViolation { component, .. }
            | Error::RepeatedEigenvalues { component, .. }
            | Error::InvalidProbability { component, .. }
            | Error::InvalidExchangeMatrix { component, .. }
            | Error::InvalidConsumptionMatrix { component, .. }
            | Error::NegativeProduction { component, .. } => Some(*component),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
