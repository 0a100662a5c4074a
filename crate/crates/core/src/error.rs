use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("decision matrix needs at least one node and one attribute (got {nodes}x{attributes})")]
    EmptyMatrix { nodes: usize, attributes: usize },

    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("degenerate input in attribute `{attribute}`: {reason}")]
    Degenerate { attribute: String, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("attribute index {index} out of range for {attributes} attributes")]
    AttributeOutOfRange { index: usize, attributes: usize },

    #[error("node index {index} out of range for {nodes} nodes")]
    NodeOutOfRange { index: usize, nodes: usize },

    #[error("pair ({0}, {0}) is not a pair of distinct nodes")]
    SameNode(usize),

    #[error("m = {m} exceeds the enumeration cap {cap}")]
    CapExceeded { m: usize, cap: usize },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
