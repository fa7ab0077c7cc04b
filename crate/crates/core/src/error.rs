//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by diagram construction, partition analysis, quotients,
/// chain verification, and document parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The cover relation contains a directed cycle, so it is not the Hasse
    /// diagram of any partial order.
    #[error("cycle detected through node `{node}`")]
    CycleDetected { node: String },

    /// A referenced node id does not exist in the diagram.
    #[error("unknown node `{node}`")]
    UnknownNode { node: String },

    /// A chain enumeration was asked to start from a non-minimal node.
    #[error("node `{node}` is not a minimal node")]
    NotMinimal { node: String },

    /// An S-set query with an empty index set.
    #[error("index set X is empty")]
    EmptyX,

    /// An S-set query referenced a subcollection index outside 1..=m.
    #[error("subcollection index {index} out of range 1..={m}")]
    XOutOfRange { index: usize, m: usize },

    /// The partition failed validation; the violations are listed in order.
    #[error("partition invalid: {}", violations.join("; "))]
    PartitionInvalid { violations: Vec<String> },

    /// The construction-applicability check did not return `Constructive`
    /// and the caller did not force the computation.
    #[error("construction not applicable (verdict: {verdict}); pass force to override")]
    NotConstructive { verdict: String },

    /// A ring-characteristic condition needed a flag the node does not carry.
    #[error("node `{node}` lacks required flag `{flag}`")]
    MissingFlags { node: String, flag: &'static str },

    /// The classes handed to a quotient do not partition the node set.
    #[error("classes do not partition the node set: {detail}")]
    NotAPartition { detail: String },

    /// A precompletion diagram's provenance disagrees with the diagram and
    /// partition it claims to be the quotient of.
    #[error("provenance mismatch: {detail}")]
    ProvenanceMismatch { detail: String },

    /// Malformed document text.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// A well-formed document that violates a structural invariant.
    #[error("invariant violation at {subject}: {rule}")]
    Invariant { subject: String, rule: String },
}

pub type Result<T> = std::result::Result<T, Error>;
