//! Exactness of lax squares and a catalog of squares known to be exact.
//!
//! A lax square `f ∘ p0 <= g ∘ p1` with `p0: P -> A`, `p1: P -> B`,
//! `f: A -> C`, `g: B -> C` is exact when for all `a`, `b`
//! `C(f a, g b) = OR_w A(a, p0 w) AND B(p1 w, b)`.

use crate::error::{Error, Result};
use crate::fib::{tensor_fibrations, Fibration};
use crate::order::{comma_object, opcomma_object, FinPreorder, LaxSquare, MonotoneMap};
use crate::rel::{compose_rel, lower, upper};

/// A pair `(a, b)` at which the exactness equation fails, as ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessWitness {
    pub a: String,
    pub b: String,
    /// Value of `C(f a, g b)`; the other side has the opposite value.
    pub hom: bool,
}

/// First pair `(a, b)`, in index order, where the exactness equation fails.
pub fn exactness_witness(sq: &LaxSquare) -> Option<ExactnessWitness> {
    let (p0, p1, f, g) = (sq.p0(), sq.p1(), sq.f(), sq.g());
    let (a, b, c) = (f.dom(), g.dom(), f.cod());
    let p = sq.vertex();
    for x in 0..a.len() {
        // elements w of P with x <= p0 w, as a filter on the vertex
        let above: Vec<usize> = (0..p.len()).filter(|&w| a.leq(x, p0.apply(w))).collect();
        for y in 0..b.len() {
            let hom = c.leq(f.apply(x), g.apply(y));
            let witnessed = above.iter().any(|&w| b.leq(p1.apply(w), y));
            if hom != witnessed {
                return Some(ExactnessWitness {
                    a: a.id(x).to_string(),
                    b: b.id(y).to_string(),
                    hom,
                });
            }
        }
    }
    None
}

pub fn is_exact_square(sq: &LaxSquare) -> bool {
    exactness_witness(sq).is_none()
}

/// Exactness decided as the relation equation `f_up ∘ g_low = (p0)_low ∘ (p1)_up`.
pub fn is_exact_by_relations(sq: &LaxSquare) -> bool {
    let lhs = compose_rel(&upper(sq.f()), &lower(sq.g())).expect("square shapes compose");
    let rhs = compose_rel(&lower(sq.p0()), &upper(sq.p1())).expect("square shapes compose");
    lhs == rhs
}

/// Shape tags of the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SquareKind {
    YonedaLeft,
    YonedaRight,
    Comma,
    OpComma,
    Embedding,
    AbsDense,
    AdjunctionUnit,
    AdjunctionCounit,
    RelativeAdjoint,
    AbsoluteKan,
    PullbackOfFibrations,
    Custom,
}

impl SquareKind {
    pub const ALL: [SquareKind; 12] = [
        SquareKind::YonedaLeft,
        SquareKind::YonedaRight,
        SquareKind::Comma,
        SquareKind::OpComma,
        SquareKind::Embedding,
        SquareKind::AbsDense,
        SquareKind::AdjunctionUnit,
        SquareKind::AdjunctionCounit,
        SquareKind::RelativeAdjoint,
        SquareKind::AbsoluteKan,
        SquareKind::PullbackOfFibrations,
        SquareKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SquareKind::YonedaLeft => "yoneda-left",
            SquareKind::YonedaRight => "yoneda-right",
            SquareKind::Comma => "comma",
            SquareKind::OpComma => "opcomma",
            SquareKind::Embedding => "embedding",
            SquareKind::AbsDense => "abs-dense",
            SquareKind::AdjunctionUnit => "adjunction-unit",
            SquareKind::AdjunctionCounit => "adjunction-counit",
            SquareKind::RelativeAdjoint => "relative-adjoint",
            SquareKind::AbsoluteKan => "absolute-kan",
            SquareKind::PullbackOfFibrations => "pullback-of-fibrations",
            SquareKind::Custom => "custom",
        }
    }
}

/// The maps each catalog shape is built from.
#[derive(Clone, Debug)]
pub enum CatalogInput {
    /// `f: A -> B`; square `(1_A, f, f, 1_B)`, always exact.
    YonedaLeft(MonotoneMap),
    /// `f: A -> B`; square `(f, 1_A, 1_B, f)`, always exact.
    YonedaRight(MonotoneMap),
    /// `f: A -> C`, `g: B -> C`; the comma object with its projections, always exact.
    Comma(MonotoneMap, MonotoneMap),
    /// `f: C -> A`, `g: C -> B`; the op-comma object with its injections, always exact.
    OpComma(MonotoneMap, MonotoneMap),
    /// `f: A -> B`; square `(1, 1, f, f)`, exact iff `f` is an order-embedding.
    Embedding(MonotoneMap),
    /// `e: A -> B`; square `(e, e, 1_B, 1_B)`, exact iff `e` is absolutely dense.
    AbsDense(MonotoneMap),
    /// `f: X -> A`, `u: A -> X`; square `(1_X, f, 1_X, u)`, exact iff `f` is left adjoint to `u`.
    AdjunctionUnit {
        f: MonotoneMap,
        u: MonotoneMap,
    },
    /// `f: X -> A`, `u: A -> X`; square `(u, 1_A, f, 1_A)`, exact iff `f` is left adjoint to `u`.
    AdjunctionCounit {
        f: MonotoneMap,
        u: MonotoneMap,
    },
    /// `f: X' -> A`, `u: A -> X`, `j: X' -> X`; square `(1, f, j, u)`,
    /// exact iff `X(j x, u a) = A(f x, a)`.
    RelativeAdjoint {
        f: MonotoneMap,
        u: MonotoneMap,
        j: MonotoneMap,
    },
    /// `h: A -> X`, `j: A -> B`, `l: B -> X`; square `(h, j, 1_X, l)`,
    /// exact iff `l` is an absolute left Kan extension of `h` along `j`.
    AbsoluteKan {
        h: MonotoneMap,
        j: MonotoneMap,
        l: MonotoneMap,
    },
    /// The pullback of `outer.d1` against `inner.d0`, always exact.
    PullbackOfFibrations {
        outer: Fibration,
        inner: Fibration,
    },
    Custom(LaxSquare),
}

impl CatalogInput {
    pub fn kind(&self) -> SquareKind {
        match self {
            CatalogInput::YonedaLeft(_) => SquareKind::YonedaLeft,
            CatalogInput::YonedaRight(_) => SquareKind::YonedaRight,
            CatalogInput::Comma(..) => SquareKind::Comma,
            CatalogInput::OpComma(..) => SquareKind::OpComma,
            CatalogInput::Embedding(_) => SquareKind::Embedding,
            CatalogInput::AbsDense(_) => SquareKind::AbsDense,
            CatalogInput::AdjunctionUnit { .. } => SquareKind::AdjunctionUnit,
            CatalogInput::AdjunctionCounit { .. } => SquareKind::AdjunctionCounit,
            CatalogInput::RelativeAdjoint { .. } => SquareKind::RelativeAdjoint,
            CatalogInput::AbsoluteKan { .. } => SquareKind::AbsoluteKan,
            CatalogInput::PullbackOfFibrations { .. } => SquareKind::PullbackOfFibrations,
            CatalogInput::Custom(_) => SquareKind::Custom,
        }
    }
}

fn id(a: &FinPreorder) -> MonotoneMap {
    MonotoneMap::identity(a)
}

/// Builds the square of the given shape. Shapes whose comparison cell does
/// not exist for the given maps fail with `NotLax`; mismatched carriers fail
/// with `ShapeMismatch`.
pub fn catalog_square(input: &CatalogInput) -> Result<LaxSquare> {
    use CatalogInput::*;
    match input {
        YonedaLeft(f) => LaxSquare::new(id(f.dom()), f.clone(), f.clone(), id(f.cod())),
        YonedaRight(f) => LaxSquare::new(f.clone(), id(f.dom()), id(f.cod()), f.clone()),
        Comma(f, g) => {
            let cone = comma_object(f, g).map_err(to_shape)?;
            LaxSquare::new(cone.p0, cone.p1, f.clone(), g.clone())
        }
        OpComma(f, g) => {
            let co = opcomma_object(f, g).map_err(to_shape)?;
            LaxSquare::new(f.clone(), g.clone(), co.i0, co.i1)
        }
        Embedding(f) => LaxSquare::new(id(f.dom()), id(f.dom()), f.clone(), f.clone()),
        AbsDense(e) => LaxSquare::new(e.clone(), e.clone(), id(e.cod()), id(e.cod())),
        AdjunctionUnit { f, u } => LaxSquare::new(id(f.dom()), f.clone(), id(f.dom()), u.clone()),
        AdjunctionCounit { f, u } => LaxSquare::new(u.clone(), id(u.dom()), f.clone(), id(u.dom())),
        RelativeAdjoint { f, u, j } => LaxSquare::new(id(f.dom()), f.clone(), j.clone(), u.clone()),
        AbsoluteKan { h, j, l } => LaxSquare::new(h.clone(), j.clone(), id(h.cod()), l.clone()),
        PullbackOfFibrations { outer, inner } => {
            let t = tensor_fibrations(outer, inner).map_err(to_shape)?;
            LaxSquare::new(
                t.pullback.p0,
                t.pullback.p1,
                outer.span().d1().clone(),
                inner.span().d0().clone(),
            )
        }
        Custom(sq) => Ok(sq.clone()),
    }
}

fn to_shape(e: Error) -> Error {
    match e {
        Error::DomainMismatch(m) | Error::CodomainMismatch(m) | Error::ObjectMismatch(m) => {
            Error::ShapeMismatch(m)
        }
        other => other,
    }
}

/// Opposite preorders everywhere, with the two paths around the square exchanged.
pub fn dual_square(sq: &LaxSquare) -> LaxSquare {
    LaxSquare::new(
        sq.p1().opposite(),
        sq.p0().opposite(),
        sq.g().opposite(),
        sq.f().opposite(),
    )
    .expect("the dual of a lax square is lax")
}

/// Exactness for squares whose `f` and `p1` have right adjoints: compares
/// `p0 ∘ p1^r` with `f^r ∘ g` up to pointwise equivalence (equality on posets).
pub fn left_adjoint_square_criterion(sq: &LaxSquare) -> Result<bool> {
    let fr = sq
        .f()
        .find_right_adjoint()
        .ok_or_else(|| Error::NotLeftAdjoint("f".into()))?;
    let p1r = sq
        .p1()
        .find_right_adjoint()
        .ok_or_else(|| Error::NotLeftAdjoint("p1".into()))?;
    let lhs = sq.p0().after(&p1r)?;
    let rhs = fr.after(sq.g())?;
    Ok(lhs.leq_pointwise(&rhs)? && rhs.leq_pointwise(&lhs)?)
}

/// Whether `X(x, l b) = OR_a X(x, h a) AND B(j a, b)` for all `x`, `b`.
pub fn is_absolute_lan(h: &MonotoneMap, j: &MonotoneMap, l: &MonotoneMap) -> Result<bool> {
    if h.dom() != j.dom() || j.cod() != l.dom() || h.cod() != l.cod() {
        return Err(Error::ShapeMismatch(
            "expected h: A -> X, j: A -> B, l: B -> X".into(),
        ));
    }
    let j = j.reexpressed(h.dom(), l.dom())?;
    let l = l.reexpressed(j.cod(), h.cod())?;
    let (a, b, x) = (h.dom(), j.cod(), h.cod());
    Ok((0..x.len()).all(|xi| {
        (0..b.len()).all(|bi| {
            x.leq(xi, l.apply(bi))
                == (0..a.len()).any(|ai| x.leq(xi, h.apply(ai)) && b.leq(j.apply(ai), bi))
        })
    }))
}

/// Whether `X(j x, u a) = A(f x, a)` for `f: X' -> A`, `u: A -> X`, `j: X' -> X`.
pub fn is_relative_adjoint(f: &MonotoneMap, u: &MonotoneMap, j: &MonotoneMap) -> Result<bool> {
    if f.dom() != j.dom() || f.cod() != u.dom() || u.cod() != j.cod() {
        return Err(Error::ShapeMismatch(
            "expected f: X' -> A, u: A -> X, j: X' -> X".into(),
        ));
    }
    let u = u.reexpressed(f.cod(), u.cod())?;
    let j = j.reexpressed(f.dom(), u.cod())?;
    let (xp, a, x) = (f.dom(), f.cod(), u.cod());
    Ok((0..xp.len())
        .all(|xi| (0..a.len()).all(|ai| x.leq(j.apply(xi), u.apply(ai)) == a.leq(f.apply(xi), ai))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> FinPreorder {
        FinPreorder::chain(["0", "1"]).unwrap()
    }

    fn vee() -> FinPreorder {
        FinPreorder::new(["a", "b", "c"], &[("a", "c"), ("b", "c")], true).unwrap()
    }

    #[test]
    fn comma_and_yoneda_are_exact() {
        let a = FinPreorder::chain(["0", "1", "2"]).unwrap();
        let f = MonotoneMap::new(&a, &vee(), vec![0, 2, 2]).unwrap();
        let g = MonotoneMap::new(&c2(), &vee(), vec![1, 2]).unwrap();
        for input in [
            CatalogInput::Comma(f.clone(), g.clone()),
            CatalogInput::YonedaLeft(f.clone()),
            CatalogInput::YonedaRight(g.clone()),
        ] {
            let sq = catalog_square(&input).unwrap();
            assert!(is_exact_square(&sq), "{:?}", input.kind());
            assert!(is_exact_by_relations(&sq));
        }
    }

    #[test]
    fn non_embedding_square_is_not_exact() {
        let d = FinPreorder::discrete(["a", "b"]).unwrap();
        let one = FinPreorder::singleton("*");
        let f = MonotoneMap::constant(&d, &one, 0);
        let sq = catalog_square(&CatalogInput::Embedding(f)).unwrap();
        let w = exactness_witness(&sq).unwrap();
        assert!(w.hom);
        assert!(!is_exact_by_relations(&sq));
    }

    #[test]
    fn adjunction_unit_from_right_adjoint() {
        let c3 = FinPreorder::chain(["0", "1", "2"]).unwrap();
        let f = MonotoneMap::new(&c3, &c2(), vec![0, 1, 1]).unwrap();
        let u = f.find_right_adjoint().unwrap();
        let sq = catalog_square(&CatalogInput::AdjunctionUnit { f, u }).unwrap();
        assert!(is_exact_square(&sq));
    }

    #[test]
    fn kan_extension_along_identity() {
        let h = MonotoneMap::new(&c2(), &vee(), vec![0, 2]).unwrap();
        let j = MonotoneMap::identity(&c2());
        assert!(is_absolute_lan(&h, &j, &h).unwrap());
        let l = MonotoneMap::constant(&c2(), &vee(), 2);
        assert!(!is_absolute_lan(&h, &j, &l).unwrap());
    }

    #[test]
    fn dual_is_involutive_and_preserves_exactness() {
        let f = MonotoneMap::new(&c2(), &vee(), vec![0, 2]).unwrap();
        let sq = catalog_square(&CatalogInput::Comma(f.clone(), f)).unwrap();
        let d = dual_square(&sq);
        assert!(is_exact_square(&d));
        assert_eq!(dual_square(&d), sq);
    }

    #[test]
    fn identity_square_meets_adjoint_criterion() {
        let id = MonotoneMap::identity(&vee());
        let sq = LaxSquare::new(id.clone(), id.clone(), id.clone(), id).unwrap();
        assert!(left_adjoint_square_criterion(&sq).unwrap());
    }

    #[test]
    fn not_lax_shapes_are_rejected() {
        let top = MonotoneMap::constant(&c2(), &c2(), 1);
        let bot = MonotoneMap::constant(&c2(), &c2(), 0);
        assert!(matches!(
            catalog_square(&CatalogInput::AdjunctionUnit { f: top, u: bot }),
            Err(Error::NotLax(_))
        ));
        let f = MonotoneMap::identity(&c2());
        let g = MonotoneMap::identity(&vee());
        assert!(matches!(
            catalog_square(&CatalogInput::Comma(f, g)),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
