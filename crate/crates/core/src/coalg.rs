//! Coalgebras for grammar functors, simulation, and ∇-logic model checking.

use std::collections::BTreeMap;
use std::fmt;

use crate::bits::{BitMatrix, BitSet};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::functor::carrier::{apply_functor_mor, apply_functor_ob, TCarrier};
use crate::functor::dist::{dist_law, DistLaw};
use crate::functor::elem::TElem;
use crate::functor::expr::FunctorExpr;
use crate::functor::lift::lift_relation;
use crate::order::{FinPreorder, Lowersets, MonotoneMap};
use crate::rel::{compose_rel, elementhood, lower, upper, MonotoneRelation};

/// A structure map `xi: X -> T(X)`.
#[derive(Clone, Debug)]
pub struct Coalgebra {
    carrier: FinPreorder,
    functor: FunctorExpr,
    tx: TCarrier,
    xi: MonotoneMap,
}

/// Validates `xi` against the carrier of `T(X)`.
pub fn mk_coalgebra(
    x: &FinPreorder,
    t: &FunctorExpr,
    xi: MonotoneMap,
    caps: &Caps,
) -> Result<Coalgebra> {
    let tx = apply_functor_ob(t, x, caps)?;
    if xi.dom() != x {
        return Err(Error::DomainMismatch(format!(
            "structure map is defined on [{}], carrier is [{}]",
            xi.dom().ids().join(", "),
            x.ids().join(", ")
        )));
    }
    if xi.cod() != tx.preorder() {
        return Err(Error::CodomainMismatch(format!(
            "structure map does not land in {t} applied to the carrier"
        )));
    }
    let xi = xi.reexpressed(x, tx.preorder())?;
    Ok(Coalgebra {
        carrier: x.clone(),
        functor: t.clone(),
        tx,
        xi,
    })
}

impl Coalgebra {
    /// Builds the structure map from one element literal per state.
    pub fn from_literals(
        x: &FinPreorder,
        t: &FunctorExpr,
        successors: &BTreeMap<String, String>,
        caps: &Caps,
    ) -> Result<Coalgebra> {
        let tx = apply_functor_ob(t, x, caps)?;
        for state in successors.keys() {
            x.require(state)?;
        }
        let table = x
            .ids()
            .iter()
            .map(|s| match successors.get(s) {
                Some(lit) => tx.parse_literal(lit),
                None => Err(Error::UnknownElement(format!(
                    "no successor given for state `{s}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        let xi = MonotoneMap::new(x, tx.preorder(), table)?;
        Ok(Coalgebra {
            carrier: x.clone(),
            functor: t.clone(),
            tx,
            xi,
        })
    }

    pub fn carrier(&self) -> &FinPreorder {
        &self.carrier
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn tx(&self) -> &TCarrier {
        &self.tx
    }

    pub fn xi(&self) -> &MonotoneMap {
        &self.xi
    }

    /// The element `xi(x)` of `T(X)`.
    pub fn successor(&self, x: usize) -> &TElem {
        self.tx.elem(self.xi.apply(x))
    }
}

/// Position of `e` in `carrier`, which must share its element set with the
/// carrier `e` was drawn from.
fn locate(carrier: &TCarrier, e: &TElem) -> Result<usize> {
    carrier.index_of(e).ok_or_else(|| {
        Error::FunctorMismatch(format!("element `{e}` is missing from the lifted carrier"))
    })
}

/// `Phi(R)(x2, x1) = lift(T, R)(xi2 x2, xi1 x1)` for `R: X1 -/-> X2`.
fn simulation_step(
    c1: &Coalgebra,
    c2: &Coalgebra,
    r: &MonotoneRelation,
    caps: &Caps,
) -> Result<MonotoneRelation> {
    let lifted = lift_relation(&c1.functor, r, caps)?;
    let at1 = (0..c1.carrier.len())
        .map(|x| locate(&lifted.src, c1.successor(x)))
        .collect::<Result<Vec<_>>>()?;
    let at2 = (0..c2.carrier.len())
        .map(|x| locate(&lifted.dst, c2.successor(x)))
        .collect::<Result<Vec<_>>>()?;
    let mat = BitMatrix::from_fn(c2.carrier.len(), c1.carrier.len(), |x2, x1| {
        lifted.relation.get(at2[x2], at1[x1])
    });
    MonotoneRelation::new(&c1.carrier, &c2.carrier, mat)
}

/// Whether `r <= Phi(r)`.
pub fn is_simulation(
    c1: &Coalgebra,
    c2: &Coalgebra,
    r: &MonotoneRelation,
    caps: &Caps,
) -> Result<bool> {
    check_same_functor(c1, c2)?;
    r.leq(&simulation_step(c1, c2, r, caps)?)
}

fn check_same_functor(c1: &Coalgebra, c2: &Coalgebra) -> Result<()> {
    if c1.functor != c2.functor {
        return Err(Error::FunctorMismatch(format!(
            "coalgebras for `{}` and `{}`",
            c1.functor, c2.functor
        )));
    }
    Ok(())
}

/// The greatest simulation `X1 -/-> X2`, by iterating `R := R ∧ Phi(R)` from
/// the top relation. `R(x2, x1)` means `x2` simulates `x1`.
pub fn simulation_gfp(c1: &Coalgebra, c2: &Coalgebra, caps: &Caps) -> Result<MonotoneRelation> {
    check_same_functor(c1, c2)?;
    let mut r = MonotoneRelation::top(&c1.carrier, &c2.carrier);
    loop {
        let next = r.meet(&simulation_step(c1, c2, &r, caps)?)?;
        if next == r {
            return Ok(r);
        }
        r = next;
    }
}

/// Positive ∇-logic. Subformulas of a ∇ are labelled; the payload is an
/// element literal of `T` applied to the discrete preorder of those labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Nabla {
        payload: String,
        subs: BTreeMap<String, Formula>,
    },
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn nabla<'a>(payload: &str, subs: impl IntoIterator<Item = (&'a str, Formula)>) -> Formula {
        Formula::Nabla {
            payload: payload.to_string(),
            subs: subs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    /// Nesting depth of ∇.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot => 0,
            Formula::And(a, b) | Formula::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Nabla { subs, .. } => {
                1 + subs.values().map(Formula::modal_depth).max().unwrap_or(0)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => write!(f, "⊤"),
            Formula::Bot => write!(f, "⊥"),
            Formula::And(a, b) => write!(f, "({a} ∧ {b})"),
            Formula::Or(a, b) => write!(f, "({a} ∨ {b})"),
            Formula::Nabla { payload, subs } => {
                write!(f, "∇{payload}[")?;
                for (i, (k, v)) in subs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k} := {v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// The set of states satisfying `phi`. Always up-closed in the carrier.
///
/// For `∇α` the forcing relation `F` from the discrete label preorder to
/// `X^op` is lifted along the dual functor, and `x` satisfies `∇α` iff the
/// lifted relation holds between `xi(x)` and `α`.
pub fn model_check(c: &Coalgebra, phi: &Formula, caps: &Caps) -> Result<BitSet> {
    let n = c.carrier.len();
    match phi {
        Formula::Top => Ok(BitSet::full(n)),
        Formula::Bot => Ok(BitSet::new(n)),
        Formula::And(a, b) => {
            let mut s = model_check(c, a, caps)?;
            s.intersect_with(&model_check(c, b, caps)?);
            Ok(s)
        }
        Formula::Or(a, b) => {
            let mut s = model_check(c, a, caps)?;
            s.union_with(&model_check(c, b, caps)?);
            Ok(s)
        }
        Formula::Nabla { payload, subs } => {
            let labels = FinPreorder::discrete(subs.keys().map(String::as_str))?;
            let sats = subs
                .values()
                .map(|s| model_check(c, s, caps))
                .collect::<Result<Vec<_>>>()?;
            let xop = c.carrier.opposite();
            let forcing = MonotoneRelation::new(
                &labels,
                &xop,
                BitMatrix::from_fn(n, labels.len(), |x, l| sats[l].contains(x)),
            )?;
            let lifted = lift_relation(&FunctorExpr::dual(c.functor.clone()), &forcing, caps)?;
            let alpha = lifted.src.parse_literal(payload)?;
            let mut out = BitSet::new(n);
            for x in 0..n {
                let tx = locate(&lifted.dst, &TElem::Dual(Box::new(c.successor(x).clone())))?;
                out.set(x, lifted.relation.get(tx, alpha));
            }
            Ok(out)
        }
    }
}

/// Whether `set` is up-closed in `x`.
pub fn is_up_closed(x: &FinPreorder, set: &BitSet) -> bool {
    set.iter().all(|i| x.up(i).iter().all(|j| set.contains(j)))
}

/// `τ_X: T^∂[X,2] -> [T X, 2]`, sending `t` to the set of `s` that the dual
/// lifting of elementhood `∋_X` relates to `t`. Here `[X,2]` is the poset of
/// uppersets of `X` under inclusion, realised as lowersets of `X^op`.
pub fn tau_transform(t: &FunctorExpr, x: &FinPreorder, caps: &Caps) -> Result<DistLaw> {
    dist_law(&FunctorExpr::dual(t.clone()), &x.opposite(), caps)
}

/// Preimage map `L(Q) -> L(P)` of a monotone `g: P -> Q`.
pub fn precompose_lowersets(g: &MonotoneMap, caps: &Caps) -> Result<MonotoneMap> {
    let lp = Lowersets::new(g.dom(), caps)?;
    let lq = Lowersets::new(g.cod(), caps)?;
    MonotoneMap::from_fn(lq.poset(), lp.poset(), |w| {
        let mask = (0..g.dom().len())
            .filter(|&p| lq.contains(w, g.apply(p)))
            .fold(0u64, |acc, p| acc | 1 << p);
        lp.index_of_mask(mask)
    })
}

/// `[f, 2]`: restriction of uppersets of `Y` along `f: X -> Y`.
pub fn restrict_uppersets(f: &MonotoneMap, caps: &Caps) -> Result<MonotoneMap> {
    precompose_lowersets(&f.opposite(), caps)
}

/// Naturality of elementhood along `f: X -> Y`:
/// `∋_X ∘ [f,2]_low = (f^op)_up ∘ ∋_Y`, both `[Y,2] -/-> X^op`.
pub fn elementhood_square_commutes(f: &MonotoneMap, caps: &Caps) -> Result<bool> {
    let lhs = compose_rel(
        &elementhood(f.dom(), caps)?,
        &lower(&restrict_uppersets(f, caps)?),
    )?;
    let rhs = compose_rel(&upper(&f.opposite()), &elementhood(f.cod(), caps)?)?;
    Ok(lhs == rhs)
}

/// Naturality of `τ` along `f: X -> Y`:
/// `τ_X ∘ T^∂[f,2] = [T f, 2] ∘ τ_Y`.
pub fn tau_square_commutes(t: &FunctorExpr, f: &MonotoneMap, caps: &Caps) -> Result<bool> {
    let dual = FunctorExpr::dual(t.clone());
    let tau_x = tau_transform(t, f.dom(), caps)?;
    let tau_y = tau_transform(t, f.cod(), caps)?;
    let lhs = tau_x.map.after(&apply_functor_mor(
        &dual,
        &restrict_uppersets(f, caps)?,
        caps,
    )?)?;
    let tf = apply_functor_mor(&dual, &f.opposite(), caps)?;
    let rhs = precompose_lowersets(&tf, caps)?.after(&tau_y.map)?;
    Ok(lhs == rhs)
}
