//! Spans and two-sided discrete fibrations.
//!
//! A span for a relation `R: A -/-> B` has a vertex `E` and legs
//! `d0: E -> B` (towards the target) and `d1: E -> A` (towards the source).
//! With this convention the relation of a fibration is `(d0)_low ∘ (d1)_up`.

use std::collections::HashMap;

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::order::{pullback_maps, reindexer, Cone, FinPreorder, MonotoneMap};
use crate::rel::{compose_rel, lower, upper, MonotoneRelation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    vertex: FinPreorder,
    d0: MonotoneMap,
    d1: MonotoneMap,
}

impl Span {
    pub fn new(d0: MonotoneMap, d1: MonotoneMap) -> Result<Self> {
        if d0.dom() != d1.dom() {
            return Err(Error::DomainMismatch(
                "span legs must share their domain".into(),
            ));
        }
        let vertex = d0.dom().clone();
        let d1 = d1.reexpressed(&vertex, d1.cod())?;
        Ok(Span { vertex, d0, d1 })
    }

    pub fn vertex(&self) -> &FinPreorder {
        &self.vertex
    }

    /// The leg towards the relation's target.
    pub fn d0(&self) -> &MonotoneMap {
        &self.d0
    }

    /// The leg towards the relation's source.
    pub fn d1(&self) -> &MonotoneMap {
        &self.d1
    }

    /// The relation's source.
    pub fn src(&self) -> &FinPreorder {
        self.d1.cod()
    }

    /// The relation's target.
    pub fn dst(&self) -> &FinPreorder {
        self.d0.cod()
    }

    fn legs(&self, e: usize) -> (usize, usize) {
        (self.d0.apply(e), self.d1.apply(e))
    }

    /// `R(b, a)` iff some `e` has `d0 e = b` and `d1 e = a`, for any span.
    /// Fails with `NotMonotone` if that relation breaks the bimodule law.
    pub fn relation_lenient(&self) -> Result<MonotoneRelation> {
        let mut mat = BitMatrix::new(self.dst().len(), self.src().len());
        for e in 0..self.vertex.len() {
            let (b, a) = self.legs(e);
            mat.insert(b, a);
        }
        MonotoneRelation::new(self.src(), self.dst(), mat)
    }

    /// `(d0)_low ∘ (d1)_up`, which is monotone for every span.
    pub fn diamond_composite(&self) -> MonotoneRelation {
        compose_rel(&lower(&self.d0), &upper(&self.d1)).expect("legs share the vertex")
    }

    /// Whether the span is a two-sided discrete fibration: legs jointly
    /// injective, cartesian lifts along `d0`, opcartesian lifts along `d1`,
    /// and every `e <= e'` factoring through the element `(d0 e, d1 e')`.
    pub fn is_fibration(&self) -> bool {
        self.fibration_defect().is_none()
    }

    /// A description of the first failing fibration condition, if any.
    pub fn fibration_defect(&self) -> Option<String> {
        let (a, b) = (self.src(), self.dst());
        let v = &self.vertex;
        let mut by_legs: HashMap<(usize, usize), usize> = HashMap::new();
        for e in 0..v.len() {
            if let Some(prev) = by_legs.insert(self.legs(e), e) {
                return Some(format!(
                    "legs are not jointly injective: `{}` and `{}`",
                    v.id(prev),
                    v.id(e)
                ));
            }
        }
        for e in 0..v.len() {
            let (be, ae) = self.legs(e);
            // cartesian lift: b' <= d0 e gives (b', d1 e) below e
            for b1 in b.down(be).iter() {
                match by_legs.get(&(b1, ae)) {
                    Some(&l) if v.leq(l, e) => {}
                    _ => {
                        return Some(format!(
                            "no lift of `{}` along `{}` <= `{}`",
                            v.id(e),
                            b.id(b1),
                            b.id(be)
                        ))
                    }
                }
            }
            // opcartesian lift: d1 e <= a' gives (d0 e, a') above e
            for a1 in a.up(ae).iter() {
                match by_legs.get(&(be, a1)) {
                    Some(&l) if v.leq(e, l) => {}
                    _ => {
                        return Some(format!(
                            "no lift of `{}` along `{}` <= `{}`",
                            v.id(e),
                            a.id(ae),
                            a.id(a1)
                        ))
                    }
                }
            }
        }
        for e in 0..v.len() {
            for e2 in v.up(e).iter() {
                let (be, _) = self.legs(e);
                let (_, a2) = self.legs(e2);
                match by_legs.get(&(be, a2)) {
                    Some(&m) if v.leq(e, m) && v.leq(m, e2) => {}
                    _ => {
                        return Some(format!(
                            "`{}` <= `{}` does not factor through a lift",
                            v.id(e),
                            v.id(e2)
                        ))
                    }
                }
            }
        }
        None
    }

    /// Whether the two spans agree up to a relabelling of vertices that
    /// commutes with the legs. Only meaningful for jointly injective spans.
    pub fn legs_isomorphic(&self, other: &Span) -> bool {
        if self.src() != other.src() || self.dst() != other.dst() {
            return false;
        }
        if self.vertex.len() != other.vertex.len() {
            return false;
        }
        let to_b = reindexer(other.dst(), self.dst());
        let to_a = reindexer(other.src(), self.src());
        let mine: HashMap<(usize, usize), usize> =
            (0..self.vertex.len()).map(|e| (self.legs(e), e)).collect();
        let image: Option<Vec<usize>> = (0..other.vertex.len())
            .map(|e| {
                let (b, a) = other.legs(e);
                mine.get(&(to_b(b), to_a(a))).copied()
            })
            .collect();
        let Some(image) = image else { return false };
        let n = other.vertex.len();
        (0..n)
            .all(|x| (0..n).all(|y| other.vertex.leq(x, y) == self.vertex.leq(image[x], image[y])))
    }
}

/// A span that passed [`Span::is_fibration`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fibration(Span);

impl Fibration {
    pub fn new(span: Span) -> Result<Self> {
        match span.fibration_defect() {
            None => Ok(Fibration(span)),
            Some(why) => Err(Error::NotAFibration(why)),
        }
    }

    pub fn span(&self) -> &Span {
        &self.0
    }

    pub fn into_span(self) -> Span {
        self.0
    }

    pub fn relation(&self) -> MonotoneRelation {
        let r = self
            .0
            .relation_lenient()
            .expect("the relation of a fibration is monotone");
        debug_assert_eq!(r, self.0.diamond_composite());
        r
    }
}

pub fn is_fibration(s: &Span) -> bool {
    s.is_fibration()
}

/// The relation of a fibration. Errors with `NotAFibration` on other spans;
/// use [`Span::relation_lenient`] for the plain existence formula.
pub fn span_to_relation(s: &Span) -> Result<MonotoneRelation> {
    Ok(Fibration::new(s.clone())?.relation())
}

/// Related pairs `(b,a)` ordered pointwise, with the two projections.
pub fn relation_to_fibration(r: &MonotoneRelation) -> Fibration {
    let (a, b) = (r.src(), r.dst());
    let pairs: Vec<(usize, usize)> = (0..b.len())
        .flat_map(|y| r.matrix().row(y).iter().map(move |x| (y, x)))
        .collect();
    Fibration(pair_span(b, a, &pairs))
}

fn pair_span(b: &FinPreorder, a: &FinPreorder, pairs: &[(usize, usize)]) -> Span {
    let names = pairs
        .iter()
        .map(|&(y, x)| format!("({},{})", b.id(y), a.id(x)))
        .collect();
    let vertex = FinPreorder::from_closed_fn(names, |e, f| {
        b.leq(pairs[e].0, pairs[f].0) && a.leq(pairs[e].1, pairs[f].1)
    })
    .expect("pair ids are distinct");
    let d0 = MonotoneMap::from_fn(&vertex, b, |e| pairs[e].0).expect("projection");
    let d1 = MonotoneMap::from_fn(&vertex, a, |e| pairs[e].1).expect("projection");
    Span { vertex, d0, d1 }
}

/// Result of composing two fibrations.
#[derive(Clone, Debug)]
pub struct Tensor {
    /// The composite fibration, with vertex the pairs `(c,a)` reachable
    /// through some middle element.
    pub fibration: Fibration,
    /// The pullback of the inner legs; `p0` into the outer vertex, `p1` into the inner one.
    pub pullback: Cone,
    /// The quotient map from the pullback onto the composite vertex.
    pub w: MonotoneMap,
}

/// Composes `outer: B -/-> C` after `inner: A -/-> B` by pulling back
/// `outer.d1` against `inner.d0` and collapsing the middle component.
pub fn tensor_fibrations(outer: &Fibration, inner: &Fibration) -> Result<Tensor> {
    let (e, f) = (outer.span(), inner.span());
    if e.src() != f.dst() {
        return Err(Error::ObjectMismatch(
            "middle preorders of the fibrations differ".into(),
        ));
    }
    let pullback = pullback_maps(e.d1(), f.d0())?;
    let (c, a) = (e.dst(), f.src());
    let ends: Vec<(usize, usize)> = (0..pullback.vertex.len())
        .map(|w| {
            (
                e.d0().apply(pullback.p0.apply(w)),
                f.d1().apply(pullback.p1.apply(w)),
            )
        })
        .collect();
    let mut pairs = ends.clone();
    pairs.sort_unstable();
    pairs.dedup();
    let span = pair_span(c, a, &pairs);
    let lookup: HashMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let w = MonotoneMap::from_fn(&pullback.vertex, &span.vertex, |x| lookup[&ends[x]])?;
    let fibration = Fibration::new(span)?;
    Ok(Tensor {
        fibration,
        pullback,
        w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::comma_object;
    use crate::rel::id_rel;

    fn c2() -> FinPreorder {
        FinPreorder::chain(["0", "1"]).unwrap()
    }

    #[test]
    fn identity_relation_fibration() {
        let fib = relation_to_fibration(&id_rel(&c2()));
        let mut ids = fib.span().vertex().ids().to_vec();
        ids.sort();
        assert_eq!(ids, ["(0,0)", "(0,1)", "(1,1)"]);
        assert_eq!(fib.relation(), id_rel(&c2()));
    }

    #[test]
    fn bottom_relation_has_empty_vertex() {
        let a = c2();
        let fib = relation_to_fibration(&MonotoneRelation::bottom(&a, &a));
        assert!(fib.span().vertex().is_empty());
        assert_eq!(fib.relation(), MonotoneRelation::bottom(&a, &a));
    }

    #[test]
    fn identity_span_is_not_a_fibration() {
        let id = MonotoneMap::identity(&c2());
        let s = Span::new(id.clone(), id).unwrap();
        assert!(!s.is_fibration());
        assert!(matches!(span_to_relation(&s), Err(Error::NotAFibration(_))));
    }

    #[test]
    fn comma_span_is_a_fibration() {
        let a = FinPreorder::chain(["0", "1", "2"]).unwrap();
        let f = MonotoneMap::new(&a, &c2(), vec![0, 0, 1]).unwrap();
        let g = MonotoneMap::identity(&c2());
        let cone = comma_object(&f, &g).unwrap();
        let s = Span::new(cone.p0, cone.p1).unwrap();
        assert!(s.is_fibration());
        let r = span_to_relation(&s).unwrap();
        for x in 0..3 {
            for y in 0..2 {
                assert_eq!(r.get(x, y), c2().leq(f.apply(x), y));
            }
        }
    }

    #[test]
    fn empty_span_gives_bottom() {
        let e = FinPreorder::empty();
        let d0 = MonotoneMap::new(&e, &c2(), vec![]).unwrap();
        let s = Span::new(d0.clone(), d0).unwrap();
        assert_eq!(
            span_to_relation(&s).unwrap(),
            MonotoneRelation::bottom(&c2(), &c2())
        );
    }

    #[test]
    fn tensor_with_identity() {
        let a = c2();
        let b = FinPreorder::discrete(["x", "y"]).unwrap();
        let r = MonotoneRelation::from_fn(&a, &b, |y, x| y == 0 || x == 1).unwrap();
        let t = tensor_fibrations(
            &relation_to_fibration(&id_rel(&b)),
            &relation_to_fibration(&r),
        )
        .unwrap();
        assert_eq!(t.fibration.relation(), r);
        assert!(t.w.is_surjective_on_objects());
    }
}
