//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Error`]. Variants
//! correspond to violated preconditions or invariants, and carry enough
//! context (labels, tags, dimensions) to be actionable in diagnostics.

use thiserror::Error;

/// Errors raised by construction, validation, and protocol operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A weight was negative where only nonnegative weights are allowed.
    #[error("negative weight {weight} for label {label:?}")]
    NegativeWeight { label: String, weight: String },

    /// The weights of a source element summed to more than one.
    #[error("total weight {total} exceeds one")]
    TotalWeightExceedsOne { total: String },

    /// The same label appeared twice in one construction.
    #[error("duplicate label {label:?}")]
    DuplicateLabel { label: String },

    /// An enumeration of labels is not an ordering of the given source
    /// element (missing support labels, or weights not descending along it).
    #[error("not an ordering: {detail}")]
    NotAnOrdering { detail: String },

    /// Two sequences or matrices that must have matching dimensions did not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A witness or decomposition was requested for a non-majorized pair.
    #[error("not majorized: prefix sums exceed the target at index {index}")]
    NotMajorized { index: usize },

    /// A matrix violated the (doubly) substochastic bounds.
    #[error("not substochastic: {detail}")]
    NotSubstochastic { detail: String },

    /// No perfect matching exists on the positive entries of a matrix that
    /// was expected to be decomposable.
    #[error("no perfect matching on positive entries")]
    NoPerfectMatching,

    /// The given enumeration fails to order every member of a set, or the
    /// set admits no common ordering at all.
    #[error("no common ordering: {detail}")]
    NotCommonOrdering { detail: String },

    /// A protocol step referenced a subject absent from the network.
    #[error("unknown subject {subject:?}")]
    UnknownSubject { subject: String },

    /// A protocol step referenced a tag that no earlier step produced.
    #[error("unknown tag {tag:?}")]
    UnknownTag { tag: String },

    /// A produced tag collides with an existing one, or is never defined.
    #[error("dangling tag {tag:?}")]
    DanglingTag { tag: String },

    /// A protocol step is structurally invalid (empty fusion, self-request
    /// with no maps, and so on).
    #[error("malformed step {index}: {detail}")]
    MalformedStep { index: usize, detail: String },

    /// A resource expected to be deterministic (point masses only) was not.
    #[error("not deterministic at input {label:?}")]
    NotDeterministic { label: String },

    /// A textual value could not be parsed.
    #[error("parse error: {detail}")]
    Parse { detail: String },

    /// A structural invariant was violated (descending order, casting laws,
    /// disjoint alphabets, total transition functions, ...).
    #[error("invariant violation: {detail}")]
    InvariantViolation { detail: String },
}

impl Error {
    /// Shorthand for [`Error::InvariantViolation`].
    pub fn invariant(detail: impl Into<String>) -> Self {
        Error::InvariantViolation {
            detail: detail.into(),
        }
    }
}
