//! The action of functor expressions on preorders and monotone maps.

use std::collections::HashMap;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::functor::elem::{sort_by_rendering, TElem};
use crate::functor::expr::FunctorExpr;
use crate::masks::{self, bits, MaskOrder};
use crate::order::{FinPreorder, MonotoneMap};

/// `T(A)` together with the bookkeeping needed to apply `T` to maps and to
/// read element literals.
#[derive(Clone)]
pub struct TCarrier {
    expr: FunctorExpr,
    base: FinPreorder,
    preorder: FinPreorder,
    elems: Vec<TElem>,
    index: HashMap<TElem, usize>,
    shape: Shape,
}

#[derive(Clone)]
enum Shape {
    Id,
    Const,
    Dual(Box<TCarrier>),
    Sum(Box<TCarrier>, Box<TCarrier>),
    Prod(Box<TCarrier>, Box<TCarrier>),
    Sets(Box<SetLayer>),
    Components { comp_of: Vec<usize> },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SetKind {
    Low,
    Up,
    All,
    Convex,
}

#[derive(Clone)]
struct SetLayer {
    kind: SetKind,
    inner: TCarrier,
    order: MaskOrder,
    masks: Vec<u64>,
    lookup: HashMap<u64, usize>,
}

impl SetLayer {
    fn normalize(&self, mask: u64) -> u64 {
        match self.kind {
            SetKind::Low => self.order.down_closure(mask),
            SetKind::Up => self.order.up_closure(mask),
            SetKind::All => mask,
            SetKind::Convex => self.order.convex_hull(mask),
        }
    }
}

impl std::fmt::Debug for TCarrier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "TCarrier {} over {:?}: {:?}",
            self.expr, self.base, self.preorder
        )
    }
}

/// Computes `T(A)` with canonical element encodings.
pub fn apply_functor_ob(t: &FunctorExpr, a: &FinPreorder, caps: &Caps) -> Result<TCarrier> {
    if t.layer_depth() >= 2 {
        caps.check_nested("argument of a functor with nested layers", a.len())?;
    }
    build(t, a, caps)
}

/// Computes `T(f)` between freshly built carriers.
pub fn apply_functor_mor(t: &FunctorExpr, f: &MonotoneMap, caps: &Caps) -> Result<MonotoneMap> {
    let src = apply_functor_ob(t, f.dom(), caps)?;
    let dst = apply_functor_ob(t, f.cod(), caps)?;
    src.map_to(&dst, f)
}

fn build(t: &FunctorExpr, a: &FinPreorder, caps: &Caps) -> Result<TCarrier> {
    use FunctorExpr as F;
    let (preorder, elems, shape) = match t {
        F::Id => (
            a.clone(),
            a.ids().iter().map(|x| TElem::Id(x.clone())).collect(),
            Shape::Id,
        ),
        F::Const { name, carrier } => {
            let elems: Vec<TElem> = carrier
                .ids()
                .iter()
                .map(|x| TElem::Const {
                    name: name.clone(),
                    elem: x.clone(),
                })
                .collect();
            let p = FinPreorder::from_closed_fn(render_all(&elems), |i, j| carrier.leq(i, j))?;
            (p, elems, Shape::Const)
        }
        F::Dual(s) => {
            let inner = build(s, &a.opposite(), caps)?;
            let p = inner.preorder.opposite();
            let elems = inner
                .elems
                .iter()
                .map(|e| TElem::Dual(Box::new(e.clone())))
                .collect();
            (p, elems, Shape::Dual(Box::new(inner)))
        }
        F::Sum(s, u) => {
            let l = build(s, a, caps)?;
            let r = build(u, a, caps)?;
            caps.check_output(&format!("{t} carrier"), l.len() + r.len())?;
            let n = l.len();
            let elems: Vec<TElem> = l
                .elems
                .iter()
                .map(|e| TElem::InL(Box::new(e.clone())))
                .chain(r.elems.iter().map(|e| TElem::InR(Box::new(e.clone()))))
                .collect();
            let p = FinPreorder::from_closed_fn(render_all(&elems), |i, j| match (i < n, j < n) {
                (true, true) => l.preorder.leq(i, j),
                (false, false) => r.preorder.leq(i - n, j - n),
                _ => false,
            })?;
            (p, elems, Shape::Sum(Box::new(l), Box::new(r)))
        }
        F::Prod(s, u) => {
            let l = build(s, a, caps)?;
            let r = build(u, a, caps)?;
            caps.check_output(&format!("{t} carrier"), l.len() * r.len())?;
            let m = r.len();
            let elems: Vec<TElem> = l
                .elems
                .iter()
                .flat_map(|x| {
                    r.elems
                        .iter()
                        .map(move |y| TElem::Pair(Box::new(x.clone()), Box::new(y.clone())))
                })
                .collect();
            let p = FinPreorder::from_closed_fn(render_all(&elems), |i, j| {
                l.preorder.leq(i / m, j / m) && r.preorder.leq(i % m, j % m)
            })?;
            (p, elems, Shape::Prod(Box::new(l), Box::new(r)))
        }
        F::Low(s) => set_layer(t, SetKind::Low, build(s, a, caps)?, caps)?,
        F::Up(s) => set_layer(t, SetKind::Up, build(s, a, caps)?, caps)?,
        F::Pow | F::PowFin => set_layer(t, SetKind::All, build(&F::Id, a, caps)?, caps)?,
        F::PowConvex | F::PowConvexFin => {
            if !a.is_poset() {
                return Err(Error::ConvexOverPreorder);
            }
            set_layer(t, SetKind::Convex, build(&F::Id, a, caps)?, caps)?
        }
        F::ConnComp => {
            let comp = a.connected_components();
            let count = comp.iter().map(|&c| c + 1).max().unwrap_or(0);
            let mut reps: Vec<Option<usize>> = vec![None; count];
            for (i, &c) in comp.iter().enumerate() {
                if reps[c].is_none_or(|r| a.id(i) < a.id(r)) {
                    reps[c] = Some(i);
                }
            }
            let elems: Vec<TElem> = reps
                .iter()
                .map(|r| TElem::Comp(a.id(r.expect("every component has a member")).to_string()))
                .collect();
            let p = FinPreorder::from_closed_fn(render_all(&elems), |i, j| i == j)?;
            (p, elems, Shape::Components { comp_of: comp })
        }
    };
    let index = elems
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    Ok(TCarrier {
        expr: t.clone(),
        base: a.clone(),
        preorder,
        elems,
        index,
        shape,
    })
}

fn render_all(elems: &[TElem]) -> Vec<String> {
    elems.iter().map(TElem::render).collect()
}

fn set_layer(
    t: &FunctorExpr,
    kind: SetKind,
    inner: TCarrier,
    caps: &Caps,
) -> Result<(FinPreorder, Vec<TElem>, Shape)> {
    let what = format!("argument of {t}");
    caps.check_layer(&what, inner.len())?;
    let n = inner.len();
    let ip = &inner.preorder;
    let masks: Vec<u64> = match kind {
        SetKind::Low => masks::lowerset_masks(ip),
        SetKind::Up => masks::upperset_masks(ip),
        SetKind::All | SetKind::Convex => {
            caps.check_output(&format!("{t} carrier"), 1usize << n)?;
            let all = 0..1u64 << n;
            if kind == SetKind::Convex {
                let order = MaskOrder::new(ip);
                all.filter(|&m| order.convex_hull(m) == m).collect()
            } else {
                all.collect()
            }
        }
    };
    caps.check_output(&format!("{t} carrier"), masks.len())?;
    let order = MaskOrder::new(ip);
    let elems: Vec<TElem> = masks
        .iter()
        .map(|&m| {
            let mut members: Vec<TElem> = bits(m).map(|i| inner.elems[i].clone()).collect();
            sort_by_rendering(&mut members);
            match kind {
                SetKind::Low => TElem::DownSet(members),
                SetKind::Up => TElem::UpSet(members),
                SetKind::All | SetKind::Convex => {
                    let ids = members.iter().map(TElem::render).collect();
                    if kind == SetKind::All {
                        TElem::Subset(ids)
                    } else {
                        TElem::Convex(ids)
                    }
                }
            }
        })
        .collect();
    let p = FinPreorder::from_closed_fn(render_all(&elems), |i, j| {
        let (x, y) = (masks[i], masks[j]);
        match kind {
            SetKind::Low => x & !y == 0,
            SetKind::Up => y & !x == 0,
            SetKind::All | SetKind::Convex => order.egli_milner(x, y),
        }
    })?;
    let lookup = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let layer = SetLayer {
        kind,
        inner,
        order,
        masks,
        lookup,
    };
    Ok((p, elems, Shape::Sets(Box::new(layer))))
}

impl TCarrier {
    pub fn expr(&self) -> &FunctorExpr {
        &self.expr
    }

    /// The argument `A` of `T(A)`.
    pub fn base(&self) -> &FinPreorder {
        &self.base
    }

    pub fn preorder(&self) -> &FinPreorder {
        &self.preorder
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elem(&self, i: usize) -> &TElem {
        &self.elems[i]
    }

    pub fn elems(&self) -> &[TElem] {
        &self.elems
    }

    pub fn index_of(&self, e: &TElem) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// For powerset-style carriers, the members of element `i` as base indices.
    pub fn subset_members(&self, i: usize) -> Option<Vec<usize>> {
        match &self.shape {
            Shape::Sets(layer) if matches!(layer.kind, SetKind::All | SetKind::Convex) => {
                Some(bits(layer.masks[i]).collect())
            }
            _ => None,
        }
    }

    /// For powerset-style carriers, the element holding exactly the given
    /// base indices, after closing convex sets under betweenness.
    pub fn subset_index(&self, members: &[usize]) -> Option<usize> {
        match &self.shape {
            Shape::Sets(layer) if matches!(layer.kind, SetKind::All | SetKind::Convex) => {
                let m = members.iter().fold(0u64, |acc, &i| acc | 1 << i);
                layer.lookup.get(&layer.normalize(m)).copied()
            }
            _ => None,
        }
    }

    /// `T(f)` from this carrier to `dst`, where `f` goes from this base to `dst`'s base.
    pub fn map_to(&self, dst: &TCarrier, f: &MonotoneMap) -> Result<MonotoneMap> {
        if self.expr != dst.expr {
            return Err(Error::FunctorMismatch(format!(
                "carriers of `{}` and `{}`",
                self.expr, dst.expr
            )));
        }
        let f = f.reexpressed(&self.base, &dst.base)?;
        let table = map_table(self, dst, f.table());
        MonotoneMap::new(&self.preorder, &dst.preorder, table)
    }

    /// Reads an element literal and returns its index.
    pub fn parse_literal(&self, literal: &str) -> Result<usize> {
        let mut cur = Cursor { s: literal, at: 0 };
        let fail = |reason: String| Error::InvalidElement {
            literal: literal.to_string(),
            functor: self.expr.to_string(),
            reason,
        };
        let i = parse_into(self, &mut cur).map_err(fail)?;
        if cur.at != literal.len() {
            return Err(fail(format!("trailing input at {}", cur.at)));
        }
        Ok(i)
    }
}

fn map_table(src: &TCarrier, dst: &TCarrier, f: &[usize]) -> Vec<usize> {
    match (&src.shape, &dst.shape) {
        (Shape::Id, Shape::Id) => f.to_vec(),
        (Shape::Const, Shape::Const) => (0..src.len()).collect(),
        (Shape::Dual(s), Shape::Dual(d)) => map_table(s, d, f),
        (Shape::Sum(sl, sr), Shape::Sum(dl, dr)) => {
            let n = dl.len();
            let mut t = map_table(sl, dl, f);
            t.extend(map_table(sr, dr, f).into_iter().map(|j| n + j));
            t
        }
        (Shape::Prod(sl, sr), Shape::Prod(dl, dr)) => {
            let tl = map_table(sl, dl, f);
            let tr = map_table(sr, dr, f);
            let (m, dm) = (sr.len(), dr.len());
            (0..src.len()).map(|i| tl[i / m] * dm + tr[i % m]).collect()
        }
        (Shape::Sets(s), Shape::Sets(d)) => {
            let inner = map_table(&s.inner, &d.inner, f);
            s.masks
                .iter()
                .map(|&m| {
                    let image = bits(m).fold(0u64, |acc, i| acc | 1 << inner[i]);
                    d.lookup[&d.normalize(image)]
                })
                .collect()
        }
        (Shape::Components { comp_of: s }, Shape::Components { comp_of: d }) => {
            let mut t = vec![0; src.len()];
            for (x, &c) in s.iter().enumerate() {
                t[c] = d[f[x]];
            }
            t
        }
        _ => unreachable!("carriers of equal expressions have equal shapes"),
    }
}

struct Cursor<'a> {
    s: &'a str,
    at: usize,
}

impl Cursor<'_> {
    fn rest(&self) -> &str {
        &self.s[self.at..]
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.at += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), String> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(format!("expected `{lit}` at {}", self.at))
        }
    }

    /// An element id: everything up to the next `,`, `)`, `}` or `]` that is
    /// not nested inside brackets.
    fn atom(&mut self) -> Result<&str, String> {
        let start = self.at;
        let mut depth = 0usize;
        for (off, c) in self.rest().char_indices() {
            match c {
                '(' | '{' | '[' => depth += 1,
                ')' | '}' | ']' | ',' if depth == 0 => {
                    self.at = start + off;
                    return self.nonempty(start);
                }
                ')' | '}' | ']' => depth -= 1,
                _ => {}
            }
        }
        self.at = self.s.len();
        self.nonempty(start)
    }

    fn nonempty(&self, start: usize) -> Result<&str, String> {
        if self.at == start {
            Err(format!("expected an element id at {start}"))
        } else {
            Ok(&self.s[start..self.at])
        }
    }
}

fn lookup_id(p: &FinPreorder, id: &str) -> Result<usize, String> {
    p.index_of(id)
        .ok_or_else(|| format!("unknown element `{id}`"))
}

fn parse_into(c: &TCarrier, cur: &mut Cursor<'_>) -> Result<usize, String> {
    match &c.shape {
        Shape::Id => {
            let id = cur.atom()?;
            lookup_id(&c.base, id)
        }
        Shape::Const => {
            let FunctorExpr::Const { name, carrier } = &c.expr else {
                unreachable!("constant shape")
            };
            cur.expect(&format!("k:{name}:"))?;
            let id = cur.atom()?;
            lookup_id(carrier, id)
        }
        Shape::Dual(inner) => parse_into(inner, cur),
        Shape::Sum(l, r) => {
            if cur.eat("inl:") {
                parse_into(l, cur)
            } else if cur.eat("inr:") {
                Ok(l.len() + parse_into(r, cur)?)
            } else {
                Err(format!("expected `inl:` or `inr:` at {}", cur.at))
            }
        }
        Shape::Prod(l, r) => {
            cur.expect("(")?;
            let i = parse_into(l, cur)?;
            cur.expect(",")?;
            let j = parse_into(r, cur)?;
            cur.expect(")")?;
            Ok(i * r.len() + j)
        }
        Shape::Sets(layer) => {
            let prefix = match layer.kind {
                SetKind::Low => "v{",
                SetKind::Up => "^{",
                SetKind::All | SetKind::Convex => "{",
            };
            cur.expect(prefix)?;
            let mut mask = 0u64;
            if !cur.eat("}") {
                loop {
                    mask |= 1 << parse_into(&layer.inner, cur)?;
                    if cur.eat("}") {
                        break;
                    }
                    cur.expect(",")?;
                }
            }
            let normal = layer.normalize(mask);
            if normal != mask && layer.kind != SetKind::Convex {
                return Err(match layer.kind {
                    SetKind::Low => "set is not down-closed".to_string(),
                    _ => "set is not up-closed".to_string(),
                });
            }
            layer
                .lookup
                .get(&normal)
                .copied()
                .ok_or_else(|| "set is not an element of the carrier".to_string())
        }
        Shape::Components { comp_of } => {
            cur.expect("cc:")?;
            let id = cur.atom()?;
            Ok(comp_of[lookup_id(&c.base, id)?])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::expr::{parse_functor, Registry};

    fn c2() -> FinPreorder {
        FinPreorder::chain(["0", "1"]).unwrap()
    }

    fn carrier(src: &str, a: &FinPreorder) -> TCarrier {
        apply_functor_ob(
            &parse_functor(src, &Registry::new()).unwrap(),
            a,
            &Caps::default(),
        )
        .unwrap()
    }

    #[test]
    fn lowersets_of_chain_form_a_chain() {
        let c = carrier("L Id", &c2());
        assert_eq!(
            c.preorder(),
            &FinPreorder::chain(["v{}", "v{0}", "v{0,1}"]).unwrap()
        );
    }

    #[test]
    fn powerset_of_discrete_pair() {
        let d2 = FinPreorder::discrete(["a", "b"]).unwrap();
        let c = carrier("P", &d2);
        assert_eq!(c.len(), 4);
        let p = c.preorder();
        let empty = p.require("{}").unwrap();
        for i in 0..4 {
            assert_eq!(p.leq(empty, i), i == empty);
            assert_eq!(p.leq(i, empty), i == empty);
        }
        // nonempty subsets: {a}, {b}, {a,b} pairwise incomparable
        let ne: Vec<usize> = (0..4).filter(|&i| i != empty).collect();
        for &i in &ne {
            for &j in &ne {
                assert_eq!(p.leq(i, j), i == j);
            }
        }
    }

    #[test]
    fn components() {
        let vee = FinPreorder::new(["a", "b", "c"], &[("a", "c"), ("b", "c")], true).unwrap();
        assert_eq!(carrier("CC", &vee).len(), 1);
        let d = FinPreorder::discrete(["a", "b"]).unwrap();
        assert_eq!(carrier("CC", &d).preorder().ids(), ["cc:a", "cc:b"]);
    }

    #[test]
    fn convex_needs_poset() {
        let cyc = FinPreorder::new(["x", "y"], &[("x", "y"), ("y", "x")], false).unwrap();
        let t = parse_functor("Pc", &Registry::new()).unwrap();
        assert_eq!(
            apply_functor_ob(&t, &cyc, &Caps::default()).unwrap_err(),
            Error::ConvexOverPreorder
        );
    }

    #[test]
    fn convex_subsets_of_three_chain() {
        let c3 = FinPreorder::chain(["0", "1", "2"]).unwrap();
        let c = carrier("Pc", &c3);
        // empty set plus the six intervals
        assert_eq!(c.len(), 7);
        assert_eq!(
            c.parse_literal("{0,2}").unwrap(),
            c.parse_literal("{0,1,2}").unwrap()
        );
    }

    #[test]
    fn literals_round_trip() {
        let c = carrier("L(Id + Id) * dual(P) + CC", &c2());
        for i in 0..c.len() {
            let id = c.preorder().id(i).to_string();
            assert_eq!(c.parse_literal(&id).unwrap(), i, "{id}");
        }
        assert!(c.parse_literal("inl:(v{inl:1},{})").is_err());
        assert!(c.parse_literal("inr:cc:0 ").is_err());
    }

    #[test]
    fn dual_of_convex_powerset_is_literally_equal() {
        let vee = FinPreorder::new(["a", "b", "c"], &[("a", "c"), ("b", "c")], true).unwrap();
        assert_eq!(
            carrier("dual(Pc)", &vee).preorder(),
            carrier("Pc", &vee).preorder()
        );
    }

    #[test]
    fn up_matches_dual_low_dual() {
        let vee = FinPreorder::new(["a", "b", "c"], &[("a", "c"), ("b", "c")], true).unwrap();
        let up = carrier("U Id", &vee);
        let dld = carrier("dual(L dual(Id))", &vee);
        assert_eq!(up.len(), dld.len());
        let rename = |s: &str| s.replacen('^', "v", 1);
        for i in 0..up.len() {
            for j in 0..up.len() {
                let x = dld
                    .preorder()
                    .require(&rename(up.preorder().id(i)))
                    .unwrap();
                let y = dld
                    .preorder()
                    .require(&rename(up.preorder().id(j)))
                    .unwrap();
                assert_eq!(up.preorder().leq(i, j), dld.preorder().leq(x, y));
            }
        }
    }

    #[test]
    fn identity_is_preserved() {
        let vee = FinPreorder::new(["a", "b", "c"], &[("a", "c"), ("b", "c")], true).unwrap();
        let t = parse_functor("L P + Pc * CC", &Registry::new()).unwrap();
        let id = MonotoneMap::identity(&vee);
        let tid = apply_functor_mor(&t, &id, &Caps::default()).unwrap();
        assert_eq!(tid, MonotoneMap::identity(tid.dom()));
    }
}
