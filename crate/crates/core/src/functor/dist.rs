//! The distributive law of a functor over the lowerset monad.

use crate::caps::Caps;
use crate::error::Result;
use crate::functor::carrier::TCarrier;
use crate::functor::expr::FunctorExpr;
use crate::functor::lift::lift_relation;
use crate::order::{FinPreorder, Lowersets, MonotoneMap};
use crate::rel::membership;

/// `λ_A: T(LA) -> L(TA)`, sending `t` to `{s | T(∈_A)(s, t)}` where `∈_A`
/// is the membership relation from `LA` to `A`.
pub fn dist_law(t: &FunctorExpr, a: &FinPreorder, caps: &Caps) -> Result<DistLaw> {
    let mem = membership(a, caps)?;
    let lifted = lift_relation(t, &mem, caps)?;
    let lta = Lowersets::new(lifted.dst.preorder(), caps)?;
    let rel = &lifted.relation;
    let map = MonotoneMap::from_fn(lifted.src.preorder(), lta.poset(), |x| {
        let mask = (0..lifted.dst.len())
            .filter(|&s| rel.get(s, x))
            .fold(0u64, |acc, s| acc | 1 << s);
        lta.index_of_mask(mask)
    })?;
    Ok(DistLaw {
        map,
        t_of_la: lifted.src,
        ta: lifted.dst,
    })
}

/// The component `λ_A` with the carriers `T(LA)` and `TA` it was computed over.
#[derive(Clone, Debug)]
pub struct DistLaw {
    pub map: MonotoneMap,
    pub t_of_la: TCarrier,
    pub ta: TCarrier,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::carrier::apply_functor_mor;
    use crate::rel::{lower_map, yoneda_unit};

    fn c2() -> FinPreorder {
        FinPreorder::chain(["0", "1"]).unwrap()
    }

    #[test]
    fn identity_functor_gives_identity() {
        let d = dist_law(&FunctorExpr::Id, &c2(), &Caps::default()).unwrap();
        assert_eq!(d.map, MonotoneMap::identity(d.map.dom()));
    }

    #[test]
    fn powerset_unit_coherence_and_naturality() {
        let caps = Caps::default();
        let t = FunctorExpr::Pow;
        let a = c2();
        let d = dist_law(&t, &a, &caps).unwrap();
        let ty = apply_functor_mor(&t, &yoneda_unit(&a, &caps).unwrap(), &caps).unwrap();
        let y_ta = yoneda_unit(d.ta.preorder(), &caps).unwrap();
        assert_eq!(d.map.after(&ty).unwrap(), y_ta);

        let b = FinPreorder::new(["x", "y", "z"], &[("x", "z")], true).unwrap();
        let f = MonotoneMap::new(&a, &b, vec![0, 2]).unwrap();
        let db = dist_law(&t, &b, &caps).unwrap();
        let tlf = apply_functor_mor(&t, &lower_map(&f, &caps).unwrap(), &caps).unwrap();
        let ltf = lower_map(&apply_functor_mor(&t, &f, &caps).unwrap(), &caps).unwrap();
        assert_eq!(db.map.after(&tlf).unwrap(), ltf.after(&d.map).unwrap());
    }
}
