//! Canonical encodings of elements of `T(A)`.

use std::fmt;

/// An element of `T(A)` in normal form: set members are sorted by their
/// rendering and convex sets are stored as full hulls.
///
/// Renderings double as element ids of the carrier preorder:
///
/// | production | rendering |
/// |------------|-----------|
/// | `Id`       | the element id itself |
/// | `const(N)` | `k:N:x` |
/// | `dual(T)`  | the rendering of the inner element |
/// | `T + T`    | `inl:s`, `inr:t` |
/// | `T * T`    | `(s,t)` |
/// | `L T`      | `v{s,...}` |
/// | `U T`      | `^{s,...}` |
/// | powersets  | `{x,...}` |
/// | `CC`       | `cc:x` for the least id `x` of the component |
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TElem {
    Const { name: String, elem: String },
    Id(String),
    Dual(Box<TElem>),
    InL(Box<TElem>),
    InR(Box<TElem>),
    Pair(Box<TElem>, Box<TElem>),
    DownSet(Vec<TElem>),
    UpSet(Vec<TElem>),
    Subset(Vec<String>),
    Convex(Vec<String>),
    Comp(String),
}

impl TElem {
    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn write_set<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    prefix: &str,
    items: &[T],
) -> fmt::Result {
    f.write_str(prefix)?;
    f.write_str("{")?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("}")
}

impl fmt::Display for TElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TElem::Const { name, elem } => write!(f, "k:{name}:{elem}"),
            TElem::Id(x) => f.write_str(x),
            TElem::Dual(t) => write!(f, "{t}"),
            TElem::InL(t) => write!(f, "inl:{t}"),
            TElem::InR(t) => write!(f, "inr:{t}"),
            TElem::Pair(s, t) => write!(f, "({s},{t})"),
            TElem::DownSet(xs) => write_set(f, "v", xs),
            TElem::UpSet(xs) => write_set(f, "^", xs),
            TElem::Subset(xs) | TElem::Convex(xs) => write_set(f, "", xs),
            TElem::Comp(x) => write!(f, "cc:{x}"),
        }
    }
}

/// Sorts set members by rendering, the canonical member order.
pub(crate) fn sort_by_rendering(items: &mut [TElem]) {
    items.sort_by_cached_key(|t| t.render());
}
