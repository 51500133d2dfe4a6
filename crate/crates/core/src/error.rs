use thiserror::Error;

/// Errors raised while building or combining finite structures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate {kind} identifier `{name}`")]
    DuplicateName { kind: &'static str, name: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("size cap exceeded: {what} ({found} > {cap})")]
    TooLarge {
        what: &'static str,
        found: usize,
        cap: usize,
    },

    #[error("identity `{arrow}` on `{object}` has wrong endpoints")]
    BadIdentity { object: String, arrow: String },

    #[error("non-composable pair ({g} after {f}): target of `{f}` is not the source of `{g}`")]
    NonComposable { g: String, f: String },

    #[error("composite ({g} after {f}) = `{h}` has wrong endpoints")]
    CompositeEndpoints { g: String, f: String, h: String },

    #[error("composable pair ({g} after {f}) has no declared composite")]
    MissingComposite { g: String, f: String },

    #[error("conflicting composites declared for ({g} after {f})")]
    ConflictingComposite { g: String, f: String },

    #[error("associativity fails on ({h}, {g}, {f})")]
    Associativity { h: String, g: String, f: String },

    #[error("unit law fails for `{arrow}` with identity `{identity}`")]
    Unit { arrow: String, identity: String },

    #[error("functor: {0}")]
    Functor(String),

    #[error("natural transformation: {0}")]
    Natural(String),

    #[error("mismatched categories: {0}")]
    Mismatch(String),

    #[error("indexed category: {0}")]
    Indexed(String),

    #[error("sieve: {0}")]
    Sieve(String),

    #[error("candidate is not a topology: {0}")]
    NotATopology(String),

    #[error("presheaf: {0}")]
    Presheaf(String),

    #[error("adjunction data invalid: {0}")]
    Adjunction(String),

    #[error("not computable: {0}")]
    NotComputable(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    /// An error inside a bundle, located by a JSON pointer.
    #[error("{path}: {source}")]
    At { path: String, source: Box<Error> },
}

impl Error {
    /// Locates `self` at `path`, keeping the innermost location.
    pub fn at(self, path: impl Into<String>) -> Error {
        match self {
            Error::At { .. } => self,
            e => Error::At {
                path: path.into(),
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
