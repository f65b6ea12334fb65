//! Relation lifting along functor expressions.

use crate::bits::BitMatrix;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fib::relation_to_fibration;
use crate::functor::carrier::{apply_functor_ob, TCarrier};
use crate::functor::expr::FunctorExpr;
use crate::order::Lowersets;
use crate::rel::{compose_rel, lower, upper, MonotoneRelation};

/// A lifted relation `T(A) -/-> T(B)` with the carriers it lives between.
#[derive(Clone, Debug)]
pub struct Lifted {
    pub relation: MonotoneRelation,
    pub src: TCarrier,
    pub dst: TCarrier,
}

/// `T(R) = T(d0)_low ∘ T(d1)_up` over the fibration `d0, d1` of `R`.
pub fn lift_relation(t: &FunctorExpr, r: &MonotoneRelation, caps: &Caps) -> Result<Lifted> {
    let fib = relation_to_fibration(r);
    let span = fib.span();
    let te = apply_functor_ob(t, span.vertex(), caps)?;
    let ta = apply_functor_ob(t, r.src(), caps)?;
    let tb = apply_functor_ob(t, r.dst(), caps)?;
    let td0 = te.map_to(&tb, span.d0())?;
    let td1 = te.map_to(&ta, span.d1())?;
    let relation = compose_rel(&lower(&td0), &upper(&td1))?;
    Ok(Lifted {
        relation,
        src: ta,
        dst: tb,
    })
}

fn is_powerset(t: &FunctorExpr) -> bool {
    matches!(
        t,
        FunctorExpr::Pow | FunctorExpr::PowFin | FunctorExpr::PowConvex | FunctorExpr::PowConvexFin
    )
}

/// Egli-Milner style lifting evaluated by its quantifiers:
/// `Y` is related to `X` iff every `a` in `X` has some `b` in `Y` with
/// `R(b, a)` and every `b` in `Y` has some `a` in `X` with `R(b, a)`.
/// `variant` selects which of the four powerset carriers to use.
pub fn lift_powerset_oracle(
    variant: &FunctorExpr,
    r: &MonotoneRelation,
    caps: &Caps,
) -> Result<Lifted> {
    if !is_powerset(variant) {
        return Err(Error::FunctorMismatch(format!(
            "`{variant}` is not a powerset functor"
        )));
    }
    let ta = apply_functor_ob(variant, r.src(), caps)?;
    let tb = apply_functor_ob(variant, r.dst(), caps)?;
    let xs: Vec<Vec<usize>> = (0..ta.len())
        .map(|i| ta.subset_members(i).unwrap())
        .collect();
    let ys: Vec<Vec<usize>> = (0..tb.len())
        .map(|i| tb.subset_members(i).unwrap())
        .collect();
    let mat = BitMatrix::from_fn(tb.len(), ta.len(), |y, x| {
        let (ys, xs) = (&ys[y], &xs[x]);
        xs.iter().all(|&a| ys.iter().any(|&b| r.get(b, a)))
            && ys.iter().all(|&b| xs.iter().any(|&a| r.get(b, a)))
    });
    let relation = MonotoneRelation::new(ta.preorder(), tb.preorder(), mat)?;
    Ok(Lifted {
        relation,
        src: ta,
        dst: tb,
    })
}

/// Lowerset lifting evaluated by its quantifiers: `Y` is related to `X` iff
/// for every `b` in `Y` there are `b1 >= b` and `a1` in `X` with `R(b1, a1)`.
pub fn lift_lowerset_oracle(r: &MonotoneRelation, caps: &Caps) -> Result<MonotoneRelation> {
    caps.check_layer("argument of L", r.src().len())?;
    caps.check_layer("argument of L", r.dst().len())?;
    let la = Lowersets::new(r.src(), caps)?;
    let lb = Lowersets::new(r.dst(), caps)?;
    let (a, b) = (r.src(), r.dst());
    let mat = BitMatrix::from_fn(lb.poset().len(), la.poset().len(), |y, x| {
        (0..b.len()).filter(|&bi| lb.contains(y, bi)).all(|bi| {
            b.up(bi)
                .iter()
                .any(|b1| (0..a.len()).any(|a1| la.contains(x, a1) && r.get(b1, a1)))
        })
    });
    MonotoneRelation::new(la.poset(), lb.poset(), mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::expr::{parse_functor, Registry};
    use crate::order::FinPreorder;
    use crate::rel::id_rel;

    fn c2() -> FinPreorder {
        FinPreorder::chain(["0", "1"]).unwrap()
    }

    fn t(src: &str) -> FunctorExpr {
        parse_functor(src, &Registry::new()).unwrap()
    }

    #[test]
    fn identity_functor_lifts_to_itself() {
        let r = MonotoneRelation::from_fn(&c2(), &c2(), |b, a| b == 0 && a == 1).unwrap();
        assert_eq!(
            lift_relation(&FunctorExpr::Id, &r, &Caps::default())
                .unwrap()
                .relation,
            r
        );
    }

    #[test]
    fn lift_of_identity_is_identity() {
        let caps = Caps::default();
        let mut reg = Registry::new();
        reg.insert("K", FinPreorder::discrete(["p", "q"]).unwrap());
        for src in [
            "Id", "const(K)", "dual(Id)", "Id + Id", "Id * Id", "L Id", "U Id", "P", "Pw", "Pc",
            "Pcw", "CC",
        ] {
            let tt = parse_functor(src, &reg).unwrap();
            let l = lift_relation(&tt, &id_rel(&c2()), &caps).unwrap();
            assert_eq!(l.relation, id_rel(l.src.preorder()), "{src}");
        }
    }

    #[test]
    fn powerset_oracle_on_identity_is_egli_milner() {
        let caps = Caps::default();
        let o = lift_powerset_oracle(&FunctorExpr::Pow, &id_rel(&c2()), &caps).unwrap();
        assert_eq!(o.relation, id_rel(o.src.preorder()));
    }

    #[test]
    fn powerset_oracle_on_bottom_relates_only_empty_sets() {
        let caps = Caps::default();
        let a = c2();
        let o = lift_powerset_oracle(&FunctorExpr::Pow, &MonotoneRelation::bottom(&a, &a), &caps)
            .unwrap();
        let pairs = o.relation.pairs();
        assert_eq!(pairs, vec![("{}".to_string(), "{}".to_string())]);
    }

    #[test]
    fn lowerset_oracle_on_identity_is_inclusion() {
        let caps = Caps::default();
        let vee = FinPreorder::new(["a", "b", "c"], &[("a", "c"), ("b", "c")], true).unwrap();
        let o = lift_lowerset_oracle(&id_rel(&vee), &caps).unwrap();
        assert_eq!(o, id_rel(o.src()));
        let l = lift_relation(&t("L Id"), &id_rel(&vee), &caps).unwrap();
        assert_eq!(l.relation, o);
    }

    #[test]
    fn non_powerset_variant_is_rejected() {
        assert!(matches!(
            lift_powerset_oracle(&FunctorExpr::Id, &id_rel(&c2()), &Caps::default()),
            Err(Error::FunctorMismatch(_))
        ));
    }
}
