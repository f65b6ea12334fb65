use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),

    #[error("unknown element id `{0}`")]
    UnknownElement(String),

    #[error("order is not antisymmetric: `{0}` and `{1}` form a cycle")]
    NotAPoset(String, String),

    #[error("codomains differ: {0}")]
    CodomainMismatch(String),

    #[error("domains differ: {0}")]
    DomainMismatch(String),

    #[error("objects do not match: {0}")]
    ObjectMismatch(String),

    #[error("not monotone: {0}")]
    NotMonotone(String),

    #[error("the relations are not an adjoint pair")]
    NotAdjointPair,

    #[error("adjoint witness for `{0}` is not unique (candidates {1:?})")]
    AmbiguousWitness(String, Vec<String>),

    #[error("size cap exceeded: {what} has {size} elements, cap is {cap}")]
    SizeCapExceeded {
        what: String,
        size: usize,
        cap: usize,
    },

    #[error("span is not a two-sided discrete fibration: {0}")]
    NotAFibration(String),

    #[error("square is not lax: comparison fails at `{0}`")]
    NotLax(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("map has no right adjoint: {0}")]
    NotLeftAdjoint(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown constant functor `{0}`")]
    UnknownConst(String),

    #[error("convex powerset applied to a preorder that is not a poset")]
    ConvexOverPreorder,

    #[error("functor mismatch: {0}")]
    FunctorMismatch(String),

    #[error("invalid element `{literal}` for functor `{functor}`: {reason}")]
    InvalidElement {
        literal: String,
        functor: String,
        reason: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn cap_exceeded(what: impl Into<String>, size: usize, cap: usize) -> Error {
    Error::SizeCapExceeded {
        what: what.into(),
        size,
        cap,
    }
}
