use thiserror::Error;

use crate::space::NormViolation;

/// Errors raised by the numerical core.
///
/// Inapplicable bounds are not errors; they are reported through
/// [`crate::bounds::BoundResult::diagnostics`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector must have at least one coordinate")]
    EmptyVector,
    #[error("coordinate {index} is not finite ({value})")]
    NonFiniteCoordinate { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid norm exponent {0}: must satisfy p >= 1")]
    InvalidExponent(f64),
    #[error(
        "invalid norm weight {value} at coordinate {index}: weights must be finite and positive"
    )]
    InvalidNormWeight { index: usize, value: f64 },
    #[error("custom norm `{name}` failed axiom validation ({} violation(s))", violations.len())]
    CustomNormRejected {
        name: String,
        violations: Vec<NormViolation>,
    },
    #[error("difference quotient step must be nonzero")]
    ZeroStep,
    #[error("{0} must be a nonzero vector")]
    ZeroVector(&'static str),
    #[error("non-finite intermediate value while evaluating {0}")]
    NonFinite(&'static str),
    #[error("tolerance must be finite and positive, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid weight {value} at index {index}: weights must be finite and nonnegative")]
    InvalidWeight { index: usize, value: f64 },
    #[error("weights must have a positive sum")]
    ZeroWeightSum,
    #[error("at least one vector is required")]
    EmptyFamily,
    #[error("weight count {weights} does not match vector count {vectors}")]
    WeightCountMismatch { weights: usize, vectors: usize },
    #[error("weighted sum of norms is zero; the triangle ratio is undefined")]
    DegenerateRatio,
    #[error("precondition failed: {}", describe(.0))]
    Precondition(Vec<crate::bounds::Diagnostic>),
    #[error("parameter epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("epsilon list must be nonempty and strictly decreasing")]
    UnorderedEpsilons,
    #[error("parameter rho must lie in (0, 1), got {0}")]
    InvalidRho(f64),
    #[error("anchor index {index} out of range for {count} vectors")]
    AnchorIndex { index: usize, count: usize },
    #[error("witness vector count must be positive")]
    EmptyWitness,
}

fn describe(diags: &[crate::bounds::Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
