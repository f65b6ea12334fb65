//! Finite preorders, monotone maps and lax squares.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::bits::{BitMatrix, BitSet};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::masks::{self, render_mask};

struct Inner {
    elems: Vec<String>,
    index: HashMap<String, usize>,
    /// `leq[i][j]` iff `i <= j`.
    leq: BitMatrix,
    /// `geq[i][j]` iff `j <= i`.
    geq: BitMatrix,
}

/// A finite preorder on opaque string ids.
///
/// Cheap to clone. Equality compares ids and order, ignoring the internal
/// enumeration order of the carrier.
#[derive(Clone)]
pub struct FinPreorder(Arc<Inner>);

impl FinPreorder {
    /// Builds the reflexive-transitive closure of `pairs` (each `(x, y)` meaning `x <= y`).
    pub fn new<S: AsRef<str>>(
        elems: impl IntoIterator<Item = S>,
        pairs: &[(&str, &str)],
        require_poset: bool,
    ) -> Result<Self> {
        let elems: Vec<String> = elems.into_iter().map(|s| s.as_ref().to_string()).collect();
        let index = build_index(&elems)?;
        let mut m = BitMatrix::new(elems.len(), elems.len());
        for (x, y) in pairs {
            let i = *index
                .get(*x)
                .ok_or_else(|| Error::UnknownElement(x.to_string()))?;
            let j = *index
                .get(*y)
                .ok_or_else(|| Error::UnknownElement(y.to_string()))?;
            m.insert(i, j);
        }
        let p = Self::assemble(elems, index, m.reflexive_transitive_closure());
        if require_poset {
            p.check_poset()?;
        }
        Ok(p)
    }

    /// Builds a preorder from an arbitrary relation matrix, closing it.
    pub fn from_matrix(elems: Vec<String>, rel: &BitMatrix) -> Result<Self> {
        let index = build_index(&elems)?;
        assert_eq!(rel.rows(), elems.len());
        Ok(Self::assemble(
            elems,
            index,
            rel.reflexive_transitive_closure(),
        ))
    }

    /// Builds a preorder from an order predicate that is already reflexive and transitive.
    pub(crate) fn from_closed_fn(
        elems: Vec<String>,
        leq: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let index = build_index(&elems)?;
        let n = elems.len();
        let m = BitMatrix::from_fn(n, n, leq);
        // the check is cubic, so only small carriers are verified
        debug_assert!(n > 256 || m == m.reflexive_transitive_closure());
        Ok(Self::assemble(elems, index, m))
    }

    fn assemble(elems: Vec<String>, index: HashMap<String, usize>, leq: BitMatrix) -> Self {
        let geq = leq.transpose();
        FinPreorder(Arc::new(Inner {
            elems,
            index,
            leq,
            geq,
        }))
    }

    pub fn empty() -> Self {
        Self::assemble(Vec::new(), HashMap::new(), BitMatrix::new(0, 0))
    }

    pub fn singleton(id: &str) -> Self {
        Self::discrete([id]).expect("one id is always distinct")
    }

    pub fn discrete<S: AsRef<str>>(elems: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(elems, &[], true)
    }

    /// The chain `e0 <= e1 <= ...` in the given order.
    pub fn chain<S: AsRef<str>>(elems: impl IntoIterator<Item = S>) -> Result<Self> {
        let elems: Vec<String> = elems.into_iter().map(|s| s.as_ref().to_string()).collect();
        let index = build_index(&elems)?;
        let n = elems.len();
        Ok(Self::assemble(
            elems,
            index,
            BitMatrix::from_fn(n, n, |i, j| i <= j),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.0.elems[i]
    }

    pub fn ids(&self) -> &[String] {
        &self.0.elems
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.0.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownElement(id.to_string()))
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.0.leq.get(i, j)
    }

    pub fn equiv(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) && self.leq(j, i)
    }

    /// The order matrix, `leq_matrix()[i][j]` iff `i <= j`.
    pub fn leq_matrix(&self) -> &BitMatrix {
        &self.0.leq
    }

    /// `{j | i <= j}`.
    pub fn up(&self, i: usize) -> &BitSet {
        self.0.leq.row(i)
    }

    /// `{j | j <= i}`.
    pub fn down(&self, i: usize) -> &BitSet {
        self.0.geq.row(i)
    }

    pub fn same(&self, other: &FinPreorder) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// A pair of distinct equivalent elements, if any.
    pub fn antisymmetry_witness(&self) -> Option<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| (i + 1..self.len()).map(move |j| (i, j)))
            .find(|&(i, j)| self.equiv(i, j))
    }

    pub fn is_poset(&self) -> bool {
        self.antisymmetry_witness().is_none()
    }

    pub fn check_poset(&self) -> Result<()> {
        match self.antisymmetry_witness() {
            Some((i, j)) => Err(Error::NotAPoset(self.id(i).into(), self.id(j).into())),
            None => Ok(()),
        }
    }

    /// Same carrier, reversed order.
    pub fn opposite(&self) -> FinPreorder {
        FinPreorder(Arc::new(Inner {
            elems: self.0.elems.clone(),
            index: self.0.index.clone(),
            leq: self.0.geq.clone(),
            geq: self.0.leq.clone(),
        }))
    }

    /// Componentwise order on pairs `(a,b)`, enumerated row-major.
    pub fn product(a: &FinPreorder, b: &FinPreorder) -> Cone {
        let pairs: Vec<(usize, usize)> = (0..a.len())
            .flat_map(|i| (0..b.len()).map(move |j| (i, j)))
            .collect();
        pair_cone(a, b, pairs)
    }

    /// Disjoint union with no order between the summands; ids `inl:a`, `inr:b`.
    pub fn coproduct(a: &FinPreorder, b: &FinPreorder) -> Cocone {
        glue(a, b, |_, _| false)
    }

    /// The strongly connected components with the induced order, and the quotient map.
    ///
    /// A singleton class keeps its member's id; a larger class is named
    /// `[x,y,...]` with members sorted by id.
    pub fn quotient_poset(&self) -> (FinPreorder, MonotoneMap) {
        let n = self.len();
        let mut class_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        let mut names = Vec::new();
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = (i..n).filter(|&j| self.equiv(i, j)).collect();
            for &j in &members {
                class_of[j] = reps.len();
            }
            reps.push(i);
            names.push(if members.len() == 1 {
                self.id(i).to_string()
            } else {
                let mut ids: Vec<&str> = members.iter().map(|&j| self.id(j)).collect();
                ids.sort();
                format!("[{}]", ids.join(","))
            });
        }
        let q = FinPreorder::from_closed_fn(names, |x, y| self.leq(reps[x], reps[y]))
            .expect("class names are distinct");
        let map = MonotoneMap::from_fn(self, &q, |i| class_of[i]).expect("quotient is monotone");
        (q, map)
    }

    /// Index of the connected component of each element; components are
    /// numbered by their least member index.
    pub fn connected_components(&self) -> Vec<usize> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = next;
            while let Some(i) = stack.pop() {
                for j in self.up(i).iter().chain(self.down(i).iter()) {
                    if comp[j] == usize::MAX {
                        comp[j] = next;
                        stack.push(j);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

fn build_index(elems: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(elems.len());
    for (i, e) in elems.iter().enumerate() {
        if index.insert(e.clone(), i).is_some() {
            return Err(Error::DuplicateElement(e.clone()));
        }
    }
    Ok(index)
}

/// Pointwise-ordered preorder on the given index pairs, with both projections.
fn pair_cone(a: &FinPreorder, b: &FinPreorder, pairs: Vec<(usize, usize)>) -> Cone {
    let names = pairs
        .iter()
        .map(|&(i, j)| format!("({},{})", a.id(i), b.id(j)))
        .collect();
    let vertex = FinPreorder::from_closed_fn(names, |x, y| {
        a.leq(pairs[x].0, pairs[y].0) && b.leq(pairs[x].1, pairs[y].1)
    })
    .expect("pair ids of distinct pairs are distinct");
    let p0 = MonotoneMap::from_fn(&vertex, a, |x| pairs[x].0).expect("projection");
    let p1 = MonotoneMap::from_fn(&vertex, b, |x| pairs[x].1).expect("projection");
    Cone { vertex, p0, p1 }
}

/// Disjoint union of `a` and `b` with `inl i <= inr j` iff `cross(i, j)`.
/// `cross` must be down-closed in `i` and up-closed in `j`.
fn glue(a: &FinPreorder, b: &FinPreorder, cross: impl Fn(usize, usize) -> bool) -> Cocone {
    let na = a.len();
    let names = a
        .ids()
        .iter()
        .map(|x| format!("inl:{x}"))
        .chain(b.ids().iter().map(|y| format!("inr:{y}")))
        .collect();
    let vertex = FinPreorder::from_closed_fn(names, |x, y| match (x < na, y < na) {
        (true, true) => a.leq(x, y),
        (false, false) => b.leq(x - na, y - na),
        (true, false) => cross(x, y - na),
        (false, true) => false,
    })
    .expect("tagged ids are distinct");
    let i0 = MonotoneMap::from_fn(a, &vertex, |i| i).expect("injection");
    let i1 = MonotoneMap::from_fn(b, &vertex, |j| na + j).expect("injection");
    Cocone { vertex, i0, i1 }
}

impl PartialEq for FinPreorder {
    fn eq(&self, other: &Self) -> bool {
        if self.same(other) {
            return true;
        }
        if self.len() != other.len() {
            return false;
        }
        let perm: Option<Vec<usize>> = self.ids().iter().map(|e| other.index_of(e)).collect();
        let Some(perm) = perm else { return false };
        (0..self.len())
            .all(|i| (0..self.len()).all(|j| self.leq(i, j) == other.leq(perm[i], perm[j])))
    }
}

impl Eq for FinPreorder {}

impl fmt::Debug for FinPreorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strict: Vec<String> = (0..self.len())
            .flat_map(|i| (0..self.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.leq(i, j))
            .map(|(i, j)| format!("{}<={}", self.id(i), self.id(j)))
            .collect();
        write!(f, "FinPreorder {:?} [{}]", self.ids(), strict.join(" "))
    }
}

/// A vertex with two outgoing legs (products, comma objects, pullbacks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub vertex: FinPreorder,
    pub p0: MonotoneMap,
    pub p1: MonotoneMap,
}

/// A vertex with two incoming legs (coproducts, op-comma objects).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocone {
    pub vertex: FinPreorder,
    pub i0: MonotoneMap,
    pub i1: MonotoneMap,
}

/// An order-preserving map between finite preorders.
#[derive(Clone)]
pub struct MonotoneMap {
    dom: FinPreorder,
    cod: FinPreorder,
    table: Arc<[usize]>,
}

impl MonotoneMap {
    /// Validates a table of codomain indices, one per domain element.
    pub fn new(dom: &FinPreorder, cod: &FinPreorder, table: Vec<usize>) -> Result<Self> {
        if table.len() != dom.len() {
            return Err(Error::ShapeMismatch(format!(
                "table has {} entries, domain has {} elements",
                table.len(),
                dom.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&t| t >= cod.len()) {
            return Err(Error::UnknownElement(format!("codomain index {bad}")));
        }
        let m = MonotoneMap {
            dom: dom.clone(),
            cod: cod.clone(),
            table: table.into(),
        };
        m.check_monotone()?;
        Ok(m)
    }

    pub fn from_fn(
        dom: &FinPreorder,
        cod: &FinPreorder,
        f: impl FnMut(usize) -> usize,
    ) -> Result<Self> {
        Self::new(dom, cod, (0..dom.len()).map(f).collect())
    }

    /// Builds a map from `(x, f x)` id pairs covering the whole domain.
    pub fn from_pairs(
        dom: &FinPreorder,
        cod: &FinPreorder,
        pairs: &[(&str, &str)],
    ) -> Result<Self> {
        let mut table = vec![usize::MAX; dom.len()];
        for (x, y) in pairs {
            let i = dom.require(x)?;
            if table[i] != usize::MAX {
                return Err(Error::DuplicateElement(x.to_string()));
            }
            table[i] = cod.require(y)?;
        }
        if let Some(i) = table.iter().position(|&t| t == usize::MAX) {
            return Err(Error::ShapeMismatch(format!(
                "no image given for `{}`",
                dom.id(i)
            )));
        }
        Self::new(dom, cod, table)
    }

    pub fn identity(a: &FinPreorder) -> Self {
        MonotoneMap {
            dom: a.clone(),
            cod: a.clone(),
            table: (0..a.len()).collect(),
        }
    }

    pub fn constant(dom: &FinPreorder, cod: &FinPreorder, value: usize) -> Self {
        assert!(value < cod.len());
        MonotoneMap {
            dom: dom.clone(),
            cod: cod.clone(),
            table: vec![value; dom.len()].into(),
        }
    }

    fn check_monotone(&self) -> Result<()> {
        for i in 0..self.dom.len() {
            for j in self.dom.up(i).iter() {
                if !self.cod.leq(self.table[i], self.table[j]) {
                    return Err(Error::NotMonotone(format!(
                        "{} <= {} but images {} and {} are not ordered",
                        self.dom.id(i),
                        self.dom.id(j),
                        self.cod.id(self.table[i]),
                        self.cod.id(self.table[j])
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dom(&self) -> &FinPreorder {
        &self.dom
    }

    pub fn cod(&self) -> &FinPreorder {
        &self.cod
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply_id(&self, id: &str) -> Result<&str> {
        Ok(self.cod.id(self.table[self.dom.require(id)?]))
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &MonotoneMap) -> Result<MonotoneMap> {
        if first.cod != self.dom {
            return Err(Error::ObjectMismatch(
                "codomain of the first map is not the domain of the second".into(),
            ));
        }
        let reindex = reindexer(&first.cod, &self.dom);
        Ok(MonotoneMap {
            dom: first.dom.clone(),
            cod: self.cod.clone(),
            table: first
                .table
                .iter()
                .map(|&i| self.table[reindex(i)])
                .collect(),
        })
    }

    /// The same map over equal, possibly re-enumerated, carriers.
    pub fn reexpressed(&self, dom: &FinPreorder, cod: &FinPreorder) -> Result<MonotoneMap> {
        if self.dom.same(dom) && self.cod.same(cod) {
            return Ok(self.clone());
        }
        if self.dom != *dom {
            return Err(Error::DomainMismatch("map domain differs".into()));
        }
        if self.cod != *cod {
            return Err(Error::CodomainMismatch("map codomain differs".into()));
        }
        let to_self = reindexer(dom, &self.dom);
        let to_cod = reindexer(&self.cod, cod);
        Ok(MonotoneMap {
            dom: dom.clone(),
            cod: cod.clone(),
            table: (0..dom.len())
                .map(|i| to_cod(self.table[to_self(i)]))
                .collect(),
        })
    }

    /// The same function between opposite preorders.
    pub fn opposite(&self) -> MonotoneMap {
        MonotoneMap {
            dom: self.dom.opposite(),
            cod: self.cod.opposite(),
            table: self.table.clone(),
        }
    }

    /// Pointwise `self(x) <= other(x)`.
    pub fn leq_pointwise(&self, other: &MonotoneMap) -> Result<bool> {
        let (dom_ix, cod_ix) = self.align(other)?;
        Ok(
            (0..self.dom.len())
                .all(|i| self.cod.leq(self.table[i], cod_ix(other.table[dom_ix(i)]))),
        )
    }

    /// Reindexing closures from `self`'s carriers into `other`'s and back.
    fn align<'a>(
        &'a self,
        other: &'a MonotoneMap,
    ) -> Result<(impl Fn(usize) -> usize + 'a, impl Fn(usize) -> usize + 'a)> {
        if self.dom != other.dom {
            return Err(Error::DomainMismatch("maps have different domains".into()));
        }
        if self.cod != other.cod {
            return Err(Error::CodomainMismatch(
                "maps have different codomains".into(),
            ));
        }
        Ok((
            reindexer(&self.dom, &other.dom),
            reindexer(&other.cod, &self.cod),
        ))
    }

    pub fn is_order_embedding(&self) -> bool {
        let n = self.dom.len();
        (0..n).all(|i| {
            (0..n).all(|j| self.dom.leq(i, j) == self.cod.leq(self.table[i], self.table[j]))
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = BitSet::new(self.cod.len());
        self.table.iter().all(|&t| {
            let fresh = !seen.contains(t);
            seen.insert(t);
            fresh
        })
    }

    pub fn is_surjective_on_objects(&self) -> bool {
        let hit = BitSet::from_indices(self.cod.len(), self.table.iter().copied());
        hit.count() == self.cod.len()
    }

    /// `B(b,b') = OR_a B(b, e a) AND B(e a, b')` for all `b, b'`.
    pub fn is_absolutely_dense(&self) -> bool {
        let b = &self.cod;
        (0..b.len()).all(|x| {
            b.up(x)
                .iter()
                .all(|y| self.table.iter().any(|&ea| b.leq(x, ea) && b.leq(ea, y)))
        })
    }

    /// The right adjoint `u` with `A(f x, a) = X(x, u a)`, if one exists.
    ///
    /// On a proper preorder several maps may qualify; the least id among the
    /// greatest candidates is chosen.
    pub fn find_right_adjoint(&self) -> Option<MonotoneMap> {
        let (x, a) = (&self.dom, &self.cod);
        let mut table = Vec::with_capacity(a.len());
        for ai in 0..a.len() {
            let cands: Vec<usize> = (0..x.len())
                .filter(|&xi| a.leq(self.table[xi], ai))
                .collect();
            let top = cands
                .iter()
                .copied()
                .filter(|&t| cands.iter().all(|&c| x.leq(c, t)))
                .min_by(|&s, &t| x.id(s).cmp(x.id(t)))?;
            table.push(top);
        }
        let u = MonotoneMap::new(a, x, table).ok()?;
        let adjoint = (0..x.len())
            .all(|xi| (0..a.len()).all(|ai| a.leq(self.table[xi], ai) == x.leq(xi, u.table[ai])));
        adjoint.then_some(u)
    }
}

/// Maps indices of `from` to indices of an equal preorder `to`.
pub(crate) fn reindexer<'a>(
    from: &'a FinPreorder,
    to: &'a FinPreorder,
) -> impl Fn(usize) -> usize + 'a {
    let same = from.same(to);
    move |i| {
        if same {
            i
        } else {
            to.index_of(from.id(i)).expect("preorders are equal")
        }
    }
}

impl PartialEq for MonotoneMap {
    fn eq(&self, other: &Self) -> bool {
        match self.align(other) {
            Ok((dom_ix, cod_ix)) => {
                (0..self.dom.len()).all(|i| self.table[i] == cod_ix(other.table[dom_ix(i)]))
            }
            Err(_) => false,
        }
    }
}

impl Eq for MonotoneMap {}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = (0..self.dom.len())
            .map(|i| format!("{}->{}", self.dom.id(i), self.cod.id(self.table[i])))
            .collect();
        write!(f, "MonotoneMap [{}]", entries.join(" "))
    }
}

/// Pairs `(a,b)` with `f a <= g b`, ordered pointwise, with both projections.
pub fn comma_object(f: &MonotoneMap, g: &MonotoneMap) -> Result<Cone> {
    if f.cod != g.cod {
        return Err(Error::CodomainMismatch(
            "comma object needs a shared codomain".into(),
        ));
    }
    let c = &f.cod;
    let to_f = reindexer(&g.cod, c);
    let pairs = (0..f.dom.len())
        .flat_map(|i| (0..g.dom.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| c.leq(f.apply(i), to_f(g.apply(j))))
        .collect();
    Ok(pair_cone(&f.dom, &g.dom, pairs))
}

/// Pairs `(a,b)` with `f a = g b`, ordered pointwise.
pub fn pullback_maps(f: &MonotoneMap, g: &MonotoneMap) -> Result<Cone> {
    if f.cod != g.cod {
        return Err(Error::CodomainMismatch(
            "pullback needs a shared codomain".into(),
        ));
    }
    let to_f = reindexer(&g.cod, &f.cod);
    let pairs = (0..f.dom.len())
        .flat_map(|i| (0..g.dom.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| f.apply(i) == to_f(g.apply(j)))
        .collect();
    Ok(pair_cone(&f.dom, &g.dom, pairs))
}

/// The op-comma object of `f: C -> A` and `g: C -> B`: the disjoint union of
/// `A` and `B` with `inl a <= inr b` iff some `c` has `a <= f c` and `g c <= b`.
pub fn opcomma_object(f: &MonotoneMap, g: &MonotoneMap) -> Result<Cocone> {
    if f.dom != g.dom {
        return Err(Error::DomainMismatch(
            "op-comma object needs a shared domain".into(),
        ));
    }
    let (a, b) = (&f.cod, &g.cod);
    let to_g = reindexer(&f.dom, &g.dom);
    Ok(glue(a, b, |i, j| {
        (0..f.dom.len()).any(|c| a.leq(i, f.apply(c)) && b.leq(g.apply(to_g(c)), j))
    }))
}

/// A square `p0: P -> A`, `p1: P -> B`, `f: A -> C`, `g: B -> C` with
/// `f p0 <= g p1` pointwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaxSquare {
    p0: MonotoneMap,
    p1: MonotoneMap,
    f: MonotoneMap,
    g: MonotoneMap,
}

impl LaxSquare {
    pub fn new(p0: MonotoneMap, p1: MonotoneMap, f: MonotoneMap, g: MonotoneMap) -> Result<Self> {
        if p0.dom != p1.dom {
            return Err(Error::ShapeMismatch(
                "p0 and p1 must share their domain".into(),
            ));
        }
        if p0.cod != f.dom {
            return Err(Error::ShapeMismatch(
                "codomain of p0 must be the domain of f".into(),
            ));
        }
        if p1.cod != g.dom {
            return Err(Error::ShapeMismatch(
                "codomain of p1 must be the domain of g".into(),
            ));
        }
        if f.cod != g.cod {
            return Err(Error::ShapeMismatch(
                "f and g must share their codomain".into(),
            ));
        }
        // share carriers so that downstream code can work with raw indices
        let p1 = p1.reexpressed(p0.dom(), p1.cod())?;
        let f = f.reexpressed(p0.cod(), f.cod())?;
        let g = g.reexpressed(p1.cod(), f.cod())?;
        let c = f.cod();
        for w in 0..p0.dom.len() {
            if !c.leq(f.apply(p0.apply(w)), g.apply(p1.apply(w))) {
                return Err(Error::NotLax(p0.dom.id(w).to_string()));
            }
        }
        Ok(LaxSquare { p0, p1, f, g })
    }

    pub fn p0(&self) -> &MonotoneMap {
        &self.p0
    }
    pub fn p1(&self) -> &MonotoneMap {
        &self.p1
    }
    pub fn f(&self) -> &MonotoneMap {
        &self.f
    }
    pub fn g(&self) -> &MonotoneMap {
        &self.g
    }
    pub fn vertex(&self) -> &FinPreorder {
        &self.p0.dom
    }

    pub fn into_parts(self) -> (MonotoneMap, MonotoneMap, MonotoneMap, MonotoneMap) {
        (self.p0, self.p1, self.f, self.g)
    }
}

/// The lowersets of a preorder ordered by inclusion, named `v{a,b,...}`.
#[derive(Clone, Debug)]
pub struct Lowersets {
    base: FinPreorder,
    poset: FinPreorder,
    masks: Vec<u64>,
    lookup: HashMap<u64, usize>,
}

impl Lowersets {
    pub fn new(base: &FinPreorder, caps: &Caps) -> Result<Self> {
        caps.check_lowerset("lowerset argument", base.len())?;
        let masks = masks::lowerset_masks(base);
        caps.check_output("lowerset carrier", masks.len())?;
        let names = masks.iter().map(|&m| render_mask("v", base, m)).collect();
        let poset = FinPreorder::from_closed_fn(names, |x, y| masks[x] & !masks[y] == 0)
            .expect("distinct sets render distinctly");
        let lookup = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(Lowersets {
            base: base.clone(),
            poset,
            masks,
            lookup,
        })
    }

    pub fn base(&self) -> &FinPreorder {
        &self.base
    }

    pub fn poset(&self) -> &FinPreorder {
        &self.poset
    }

    pub fn mask(&self, i: usize) -> u64 {
        self.masks[i]
    }

    pub fn contains(&self, w: usize, a: usize) -> bool {
        self.masks[w] >> a & 1 == 1
    }

    /// Index of a down-closed mask.
    pub fn index_of_mask(&self, mask: u64) -> usize {
        *self
            .lookup
            .get(&mask)
            .expect("mask is a lowerset of the base preorder")
    }

    /// The principal lowerset of `a`.
    pub fn principal(&self, a: usize) -> usize {
        let m = self.base.down(a).iter().fold(0u64, |acc, j| acc | 1 << j);
        self.index_of_mask(m)
    }
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

    fn two_cycle() -> FinPreorder {
        FinPreorder::new(["x", "y"], &[("x", "y"), ("y", "x")], false).unwrap()
    }

    #[test]
    fn closure_of_pairs() {
        let p = FinPreorder::new(["0", "1"], &[("0", "1")], true).unwrap();
        assert_eq!(p.leq_matrix().count(), 3);
        let x = FinPreorder::new(["x"], &[], true).unwrap();
        assert_eq!(x.leq_matrix(), &BitMatrix::identity(1));
        let c3 = FinPreorder::new(["a", "b", "c"], &[("a", "b"), ("b", "c")], true).unwrap();
        let a = c3.require("a").unwrap();
        let c = c3.require("c").unwrap();
        assert!(c3.leq(a, c));
        assert_eq!(c3, FinPreorder::chain(["a", "b", "c"]).unwrap());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            FinPreorder::discrete(["a", "a"]).unwrap_err(),
            Error::DuplicateElement("a".into())
        );
        assert!(matches!(
            FinPreorder::new(["x", "y"], &[("x", "y"), ("y", "x")], true),
            Err(Error::NotAPoset(..))
        ));
        assert!(matches!(
            FinPreorder::new(["x"], &[("x", "z")], false),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn equality_ignores_enumeration_order() {
        let p = FinPreorder::new(["b", "a"], &[("a", "b")], true).unwrap();
        assert_eq!(p, FinPreorder::chain(["a", "b"]).unwrap());
        assert_ne!(p, FinPreorder::chain(["b", "a"]).unwrap());
    }

    #[test]
    fn opposite_is_involutive() {
        let op = c2().opposite();
        assert_eq!(op, FinPreorder::chain(["1", "0"]).unwrap());
        let d2 = FinPreorder::discrete(["a", "b"]).unwrap();
        assert_eq!(d2.opposite(), d2);
        assert_eq!(vee().opposite().opposite(), vee());
    }

    #[test]
    fn product_and_coproduct() {
        let cone = FinPreorder::product(&c2(), &c2());
        let v = &cone.vertex;
        assert_eq!(v.len(), 4);
        assert!(v.leq(v.require("(0,0)").unwrap(), v.require("(1,1)").unwrap()));
        assert!(!v.leq(v.require("(0,1)").unwrap(), v.require("(1,0)").unwrap()));
        let co = FinPreorder::coproduct(&c2(), &c2());
        assert_eq!(co.vertex.len(), 4);
        assert_eq!(co.vertex.leq_matrix().count(), 6);
        let unit = FinPreorder::product(&FinPreorder::singleton("*"), &vee());
        assert!(unit.p1.is_order_embedding() && unit.p1.is_surjective_on_objects());
    }

    #[test]
    fn comma_of_identities() {
        let id = MonotoneMap::identity(&c2());
        let cone = comma_object(&id, &id).unwrap();
        let mut ids = cone.vertex.ids().to_vec();
        ids.sort();
        assert_eq!(ids, ["(0,0)", "(0,1)", "(1,1)"]);
        let one = FinPreorder::singleton("*");
        let k0 = MonotoneMap::constant(&one, &c2(), 0);
        let k1 = MonotoneMap::constant(&one, &c2(), 1);
        assert_eq!(comma_object(&k0, &k1).unwrap().vertex.len(), 1);
        assert_eq!(comma_object(&k1, &k0).unwrap().vertex.len(), 0);
        let other = MonotoneMap::identity(&vee());
        assert!(matches!(
            comma_object(&id, &other),
            Err(Error::CodomainMismatch(_))
        ));
    }

    #[test]
    fn opcomma_examples() {
        let one = FinPreorder::singleton("*");
        let id1 = MonotoneMap::identity(&one);
        let co = opcomma_object(&id1, &id1).unwrap();
        assert_eq!(co.vertex, FinPreorder::chain(["inl:*", "inr:*"]).unwrap());

        let empty = FinPreorder::empty();
        let f = MonotoneMap::new(&empty, &c2(), vec![]).unwrap();
        let g = MonotoneMap::new(&empty, &vee(), vec![]).unwrap();
        let co = opcomma_object(&f, &g).unwrap();
        assert_eq!(co.vertex, FinPreorder::coproduct(&c2(), &vee()).vertex);

        let id = MonotoneMap::identity(&c2());
        let co = opcomma_object(&id, &id).unwrap();
        let v = &co.vertex;
        for x in ["0", "1"] {
            for y in ["0", "1"] {
                let l = v.require(&format!("inl:{x}")).unwrap();
                let r = v.require(&format!("inr:{y}")).unwrap();
                assert_eq!(v.leq(l, r), x <= y);
                assert!(!v.leq(r, l));
            }
        }
    }

    #[test]
    fn pullbacks() {
        let id = MonotoneMap::identity(&vee());
        assert_eq!(pullback_maps(&id, &id).unwrap().vertex.len(), 3);
        let one = FinPreorder::singleton("*");
        let k0 = MonotoneMap::constant(&one, &c2(), 0);
        let k1 = MonotoneMap::constant(&one, &c2(), 1);
        assert!(pullback_maps(&k0, &k1).unwrap().vertex.is_empty());
    }

    #[test]
    fn embedding_density_surjectivity() {
        let id = MonotoneMap::identity(&vee());
        assert!(
            id.is_order_embedding() && id.is_absolutely_dense() && id.is_surjective_on_objects()
        );

        let d = FinPreorder::discrete(["a", "b"]).unwrap();
        let f = MonotoneMap::from_pairs(&d, &vee(), &[("a", "a"), ("b", "b")]).unwrap();
        assert!(f.is_order_embedding());
        assert!(!f.is_surjective_on_objects());
        assert!(!f.is_absolutely_dense());

        let one = FinPreorder::singleton("x");
        let e = MonotoneMap::from_pairs(&one, &two_cycle(), &[("x", "x")]).unwrap();
        assert!(e.is_absolutely_dense());
        assert!(!e.is_surjective_on_objects());
    }

    #[test]
    fn right_adjoints() {
        let id = MonotoneMap::identity(&vee());
        assert_eq!(id.find_right_adjoint().unwrap(), id);

        let c3 = FinPreorder::chain(["0", "1", "2"]).unwrap();
        let f = MonotoneMap::new(&c3, &c2(), vec![0, 1, 1]).unwrap();
        let u = f.find_right_adjoint().unwrap();
        assert_eq!(u.table(), &[0, 2]);

        let top = MonotoneMap::constant(&c2(), &c2(), 1);
        assert!(top.find_right_adjoint().is_none());
        let bottom = MonotoneMap::constant(&c2(), &c2(), 0);
        assert_eq!(bottom.find_right_adjoint().unwrap().table(), &[1, 1]);
    }

    #[test]
    fn quotients() {
        let (q, map) = vee().quotient_poset();
        assert_eq!(q, vee());
        assert!(map.is_injective() && map.is_surjective_on_objects());

        let (q, _) = two_cycle().quotient_poset();
        assert_eq!(q.ids(), ["[x,y]"]);

        let p = FinPreorder::new(["x", "y", "z"], &[("x", "y"), ("y", "x")], false).unwrap();
        let (q, map) = p.quotient_poset();
        assert_eq!(q, FinPreorder::discrete(["[x,y]", "z"]).unwrap());
        assert!(q.is_poset());
        assert!(map.is_absolutely_dense());
    }

    #[test]
    fn lax_square_validation() {
        let id = MonotoneMap::identity(&c2());
        assert!(LaxSquare::new(id.clone(), id.clone(), id.clone(), id.clone()).is_ok());
        let top = MonotoneMap::constant(&c2(), &c2(), 1);
        let bottom = MonotoneMap::constant(&c2(), &c2(), 0);
        assert!(matches!(
            LaxSquare::new(id.clone(), id.clone(), top, bottom),
            Err(Error::NotLax(_))
        ));
        let v = MonotoneMap::identity(&vee());
        assert!(matches!(
            LaxSquare::new(id.clone(), v, id.clone(), id),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn lowersets_of_chain() {
        let l = Lowersets::new(&c2(), &Caps::default()).unwrap();
        assert_eq!(
            l.poset(),
            &FinPreorder::chain(["v{}", "v{0}", "v{0,1}"]).unwrap()
        );
        assert_eq!(l.poset().id(l.principal(1)), "v{0,1}");
    }

    #[test]
    fn monotonicity_is_checked() {
        let err = MonotoneMap::new(&c2(), &c2(), vec![1, 0]).unwrap_err();
        assert!(matches!(err, Error::NotMonotone(_)));
    }
}
