use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by a value below the singularity threshold ({modulus:e})")]
    DivisionAtZero { modulus: f64 },

    #[error("{func} evaluated at a branch point or pole ({arg})")]
    BranchPointOrPole { func: &'static str, arg: Complex64 },

    #[error("syntax error at byte {position}: expected one of {}", expected.join(", "))]
    Syntax { position: usize, expected: Vec<String> },

    #[error("evaluation failed at z = {z}: {reason}")]
    EvaluationFailed { z: Complex64, reason: String },

    #[error("f'(z) vanishes at z = {z} (|f'| = {modulus:e})")]
    LocallyNonUnivalent { z: Complex64, modulus: f64 },

    #[error("degenerate Mobius map: |ad - bc| = {det:e}")]
    DegenerateMobius { det: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("too many failed sample evaluations ({failed} of {total})")]
    TooManyFailures { failed: usize, total: usize },

    #[error("step size underflow at x = {x}")]
    StepSizeUnderflow { x: f64 },

    #[error("q is negative at x = {x} (q = {value})")]
    NonnegativityViolated { x: f64, value: f64 },

    #[error("y'/y does not settle as x -> 1 (tail: {tail:?})")]
    ExtrapolationDiverged { tail: Vec<(f64, f64)> },

    #[error("quadrature failed: {0}")]
    QuadratureFailed(String),

    #[error("target limit {0} outside (0, 1)")]
    TargetOutOfRange(f64),

    #[error("p could not be evaluated on the ray at z = {z}: {reason}")]
    NonAnalyticSample { z: Complex64, reason: String },

    #[error("y vanishes at x = {x}")]
    YVanishes { x: f64 },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps an evaluation error with the sample location.
    pub(crate) fn at(self, z: Complex64) -> Error {
        match self {
            e @ (Error::EvaluationFailed { .. } | Error::LocallyNonUnivalent { .. }) => e,
            other => Error::EvaluationFailed {
                z,
                reason: other.to_string(),
            },
        }
    }
}
