//! Monotone relations, their composition, and the graph, dagger and
//! elementhood constructions.
//!
//! A relation `R: A -/-> B` is stored as a matrix with one row per element
//! of `B` and one column per element of `A`: `mat[b][a]` is `R(b, a)`.
//! Monotonicity is the bimodule law
//! `R(b,a) && b1 <= b && a <= a1  =>  R(b1,a1)`.

use std::fmt;

use crate::bits::BitMatrix;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::masks::bits;
use crate::order::{reindexer, FinPreorder, Lowersets, MonotoneMap};

#[derive(Clone)]
pub struct MonotoneRelation {
    src: FinPreorder,
    dst: FinPreorder,
    mat: BitMatrix,
}

impl MonotoneRelation {
    /// Validates the bimodule law; rows index `dst`, columns index `src`.
    pub fn new(src: &FinPreorder, dst: &FinPreorder, mat: BitMatrix) -> Result<Self> {
        check_shape(src, dst, &mat)?;
        let closed = close(src, dst, &mat);
        if closed != mat {
            let (b, a) = first_difference(&closed, &mat);
            return Err(Error::NotMonotone(format!(
                "bimodule law forces ({}, {}) into the relation",
                dst.id(b),
                src.id(a)
            )));
        }
        Ok(Self::trusted(src, dst, mat))
    }

    /// The least monotone relation containing `mat`.
    pub fn monotone_closure(src: &FinPreorder, dst: &FinPreorder, mat: &BitMatrix) -> Result<Self> {
        check_shape(src, dst, mat)?;
        Ok(Self::trusted(src, dst, close(src, dst, mat)))
    }

    pub fn from_fn(
        src: &FinPreorder,
        dst: &FinPreorder,
        f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        Self::new(src, dst, BitMatrix::from_fn(dst.len(), src.len(), f))
    }

    pub(crate) fn trusted(src: &FinPreorder, dst: &FinPreorder, mat: BitMatrix) -> Self {
        debug_assert_eq!(close(src, dst, &mat), mat);
        MonotoneRelation {
            src: src.clone(),
            dst: dst.clone(),
            mat,
        }
    }

    pub fn bottom(src: &FinPreorder, dst: &FinPreorder) -> Self {
        Self::trusted(src, dst, BitMatrix::new(dst.len(), src.len()))
    }

    pub fn top(src: &FinPreorder, dst: &FinPreorder) -> Self {
        Self::trusted(src, dst, BitMatrix::full(dst.len(), src.len()))
    }

    /// The hom relation `A(a', a) = a' <= a`, unit of composition.
    pub fn identity(a: &FinPreorder) -> Self {
        Self::trusted(a, a, a.leq_matrix().clone())
    }

    pub fn src(&self) -> &FinPreorder {
        &self.src
    }

    pub fn dst(&self) -> &FinPreorder {
        &self.dst
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.mat
    }

    /// `R(b, a)` by indices into `dst` and `src`.
    #[inline]
    pub fn get(&self, b: usize, a: usize) -> bool {
        self.mat.get(b, a)
    }

    pub fn get_ids(&self, b: &str, a: &str) -> Result<bool> {
        Ok(self.get(self.dst.require(b)?, self.src.require(a)?))
    }

    /// The same relation expressed over equal (possibly re-enumerated) carriers.
    pub fn reindexed(&self, src: &FinPreorder, dst: &FinPreorder) -> Result<Self> {
        if self.src.same(src) && self.dst.same(dst) {
            return Ok(self.clone());
        }
        if self.src != *src || self.dst != *dst {
            return Err(Error::ObjectMismatch(
                "relations live between different preorders".into(),
            ));
        }
        let to_a = reindexer(src, &self.src);
        let to_b = reindexer(dst, &self.dst);
        let mat = BitMatrix::from_fn(dst.len(), src.len(), |b, a| self.get(to_b(b), to_a(a)));
        Ok(Self::trusted(src, dst, mat))
    }

    /// Pointwise implication `self(b,a) => other(b,a)`.
    pub fn leq(&self, other: &MonotoneRelation) -> Result<bool> {
        let other = other.reindexed(&self.src, &self.dst)?;
        Ok(self.mat.is_subset(&other.mat))
    }

    pub fn meet(&self, other: &MonotoneRelation) -> Result<MonotoneRelation> {
        let other = other.reindexed(&self.src, &self.dst)?;
        let mut mat = self.mat.clone();
        mat.intersect_with(&other.mat);
        Ok(Self::trusted(&self.src, &self.dst, mat))
    }

    pub fn join(&self, other: &MonotoneRelation) -> Result<MonotoneRelation> {
        let other = other.reindexed(&self.src, &self.dst)?;
        let mut mat = self.mat.clone();
        mat.union_with(&other.mat);
        Ok(Self::trusted(&self.src, &self.dst, mat))
    }

    /// The converse relation `B^op -/-> A^op`.
    pub fn converse(&self) -> MonotoneRelation {
        Self::trusted(
            &self.dst.opposite(),
            &self.src.opposite(),
            self.mat.transpose(),
        )
    }

    pub fn forget(&self) -> PlainRelation {
        PlainRelation {
            src: self.src.ids().to_vec(),
            dst: self.dst.ids().to_vec(),
            mat: self.mat.clone(),
        }
    }

    /// Related pairs as `(dst id, src id)`.
    pub fn pairs(&self) -> Vec<(String, String)> {
        (0..self.dst.len())
            .flat_map(|b| self.mat.row(b).iter().map(move |a| (b, a)))
            .map(|(b, a)| (self.dst.id(b).to_string(), self.src.id(a).to_string()))
            .collect()
    }
}

fn check_shape(src: &FinPreorder, dst: &FinPreorder, mat: &BitMatrix) -> Result<()> {
    if mat.rows() != dst.len() || mat.cols() != src.len() {
        return Err(Error::ShapeMismatch(format!(
            "matrix is {}x{}, expected {}x{} (rows index the target)",
            mat.rows(),
            mat.cols(),
            dst.len(),
            src.len()
        )));
    }
    Ok(())
}

/// `(b1, a1)` is in the closure iff `b1 <= b`, `R(b,a)`, `a <= a1` for some `b, a`.
fn close(src: &FinPreorder, dst: &FinPreorder, mat: &BitMatrix) -> BitMatrix {
    dst.leq_matrix().product(mat).product(src.leq_matrix())
}

fn first_difference(x: &BitMatrix, y: &BitMatrix) -> (usize, usize) {
    (0..x.rows())
        .flat_map(|r| (0..x.cols()).map(move |c| (r, c)))
        .find(|&(r, c)| x.get(r, c) != y.get(r, c))
        .expect("matrices differ")
}

impl PartialEq for MonotoneRelation {
    fn eq(&self, other: &Self) -> bool {
        match other.reindexed(&self.src, &self.dst) {
            Ok(o) => o.mat == self.mat,
            Err(_) => false,
        }
    }
}

impl Eq for MonotoneRelation {}

impl fmt::Debug for MonotoneRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .pairs()
            .into_iter()
            .map(|(b, a)| format!("{b}<-{a}"))
            .collect();
        write!(
            f,
            "MonotoneRelation {:?} -> {:?} [{}]",
            self.src.ids(),
            self.dst.ids(),
            pairs.join(" ")
        )
    }
}

/// `(S ∘ R)(c, a) = OR_b R(b, a) AND S(c, b)` for `R: A -/-> B`, `S: B -/-> C`.
pub fn compose_rel(s: &MonotoneRelation, r: &MonotoneRelation) -> Result<MonotoneRelation> {
    if r.dst != s.src {
        return Err(Error::ObjectMismatch(
            "target of the first relation is not the source of the second".into(),
        ));
    }
    let r = r.reindexed(&r.src, &s.src)?;
    Ok(MonotoneRelation::trusted(
        &r.src,
        &s.dst,
        s.mat.product(&r.mat),
    ))
}

pub fn id_rel(a: &FinPreorder) -> MonotoneRelation {
    MonotoneRelation::identity(a)
}

pub fn leq_rel(r: &MonotoneRelation, s: &MonotoneRelation) -> Result<bool> {
    r.leq(s)
}

/// The lower graph `f_low(b, a) = b <= f a`, a relation `A -/-> B`.
pub fn lower(f: &MonotoneMap) -> MonotoneRelation {
    let b = f.cod();
    let mat = BitMatrix::from_fn(b.len(), f.dom().len(), |y, x| b.leq(y, f.apply(x)));
    MonotoneRelation::trusted(f.dom(), b, mat)
}

/// The upper graph `f_up(a, b) = f a <= b`, a relation `B -/-> A`.
pub fn upper(f: &MonotoneMap) -> MonotoneRelation {
    let b = f.cod();
    let mat = BitMatrix::from_fn(f.dom().len(), b.len(), |x, y| b.leq(f.apply(x), y));
    MonotoneRelation::trusted(b, f.dom(), mat)
}

/// Both graphs of `f`; the first is left adjoint to the second.
pub fn diamonds(f: &MonotoneMap) -> (MonotoneRelation, MonotoneRelation) {
    (lower(f), upper(f))
}

/// Whether `id_A <= R ∘ L` and `L ∘ R <= id_B` for `L: A -/-> B`, `R: B -/-> A`.
pub fn check_adjoint_pair(l: &MonotoneRelation, r: &MonotoneRelation) -> Result<bool> {
    if l.dst != r.src || l.src != r.dst {
        return Err(Error::ObjectMismatch(
            "relations do not form a round trip".into(),
        ));
    }
    let unit = id_rel(&l.src).leq(&compose_rel(r, l)?)?;
    let counit = compose_rel(l, r)?.leq(&id_rel(&l.dst))?;
    Ok(unit && counit)
}

/// For each `a`, the elements `b` with `L(-, a) = B(-, b)` and `R(a, -) = B(b, -)`.
fn adjoint_candidates(l: &MonotoneRelation, r: &MonotoneRelation) -> Result<Vec<Vec<usize>>> {
    if !check_adjoint_pair(l, r)? {
        return Err(Error::NotAdjointPair);
    }
    let r = r.reindexed(&l.dst, &l.src)?;
    let (a, b) = (&l.src, &l.dst);
    Ok((0..a.len())
        .map(|x| {
            (0..b.len())
                .filter(|&y| {
                    (0..b.len()).all(|z| l.get(z, x) == b.leq(z, y) && r.get(x, z) == b.leq(y, z))
                })
                .collect()
        })
        .collect())
}

/// The map `f` with `f_low = L` and `f_up = R`. When the target is a proper
/// preorder several maps may qualify and the least id is chosen.
pub fn adjoint_to_map(l: &MonotoneRelation, r: &MonotoneRelation) -> Result<MonotoneMap> {
    let cands = adjoint_candidates(l, r)?;
    let b = &l.dst;
    let table = cands
        .iter()
        .map(|c| {
            c.iter()
                .copied()
                .min_by(|&x, &y| b.id(x).cmp(b.id(y)))
                .ok_or(Error::NotAdjointPair)
        })
        .collect::<Result<Vec<_>>>()?;
    MonotoneMap::new(&l.src, b, table)
}

/// As [`adjoint_to_map`], but refuses to choose between equivalent witnesses.
pub fn adjoint_to_map_unique(l: &MonotoneRelation, r: &MonotoneRelation) -> Result<MonotoneMap> {
    let cands = adjoint_candidates(l, r)?;
    for (x, c) in cands.iter().enumerate() {
        if c.len() > 1 {
            let mut ids: Vec<String> = c.iter().map(|&y| l.dst.id(y).to_string()).collect();
            ids.sort();
            return Err(Error::AmbiguousWitness(l.src.id(x).to_string(), ids));
        }
    }
    adjoint_to_map(l, r)
}

/// A relation between plain sets, with no order law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainRelation {
    pub src: Vec<String>,
    pub dst: Vec<String>,
    /// `mat[b][a]`, rows index `dst`.
    pub mat: BitMatrix,
}

impl PlainRelation {
    /// The graph `{(f a, a)}` of the underlying function of `f`.
    pub fn graph(f: &MonotoneMap) -> Self {
        PlainRelation {
            src: f.dom().ids().to_vec(),
            dst: f.cod().ids().to_vec(),
            mat: BitMatrix::from_fn(f.cod().len(), f.dom().len(), |b, a| f.apply(a) == b),
        }
    }

    pub fn converse(&self) -> Self {
        PlainRelation {
            src: self.dst.clone(),
            dst: self.src.clone(),
            mat: self.mat.transpose(),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &PlainRelation) -> Result<Self> {
        if first.dst != self.src {
            return Err(Error::ObjectMismatch(
                "plain relations do not compose".into(),
            ));
        }
        Ok(PlainRelation {
            src: first.src.clone(),
            dst: self.dst.clone(),
            mat: self.mat.product(&first.mat),
        })
    }
}

pub fn forget_rel(r: &MonotoneRelation) -> PlainRelation {
    r.forget()
}

/// `{b | r(b, a)}` as a mask, for every `a`.
fn column_masks(r: &MonotoneRelation) -> Vec<u64> {
    (0..r.src.len())
        .map(|a| {
            (0..r.dst.len())
                .filter(|&b| r.get(b, a))
                .fold(0u64, |acc, b| acc | 1 << b)
        })
        .collect()
}

pub(crate) fn dagger_between(r: &MonotoneRelation, la: &Lowersets, lb: &Lowersets) -> MonotoneMap {
    let cols = column_masks(r);
    MonotoneMap::from_fn(la.poset(), lb.poset(), |w| {
        let image = bits(la.mask(w)).fold(0u64, |acc, a| acc | cols[a]);
        lb.index_of_mask(image)
    })
    .expect("the Kleisli extension is monotone")
}

/// The Kleisli extension `W |-> {b | exists a in W. R(b, a)}`, a map `LA -> LB`.
pub fn dagger(r: &MonotoneRelation, caps: &Caps) -> Result<MonotoneMap> {
    let la = Lowersets::new(&r.src, caps)?;
    let lb = Lowersets::new(&r.dst, caps)?;
    Ok(dagger_between(r, &la, &lb))
}

/// The lowerset functor on maps: `W |-> down-closure of f(W)`.
pub fn lower_map(f: &MonotoneMap, caps: &Caps) -> Result<MonotoneMap> {
    dagger(&lower(f), caps)
}

/// The Yoneda embedding `a |-> {a' | a' <= a}`.
pub fn yoneda_unit(a: &FinPreorder, caps: &Caps) -> Result<MonotoneMap> {
    let la = Lowersets::new(a, caps)?;
    Ok(MonotoneMap::from_fn(a, la.poset(), |x| la.principal(x))
        .expect("principal lowersets are monotone"))
}

/// Union of a lowerset of lowersets, a map `LLA -> LA`.
pub fn kz_mult(a: &FinPreorder, caps: &Caps) -> Result<MonotoneMap> {
    let la = Lowersets::new(a, caps)?;
    let lla = Lowersets::new(la.poset(), caps)?;
    Ok(MonotoneMap::from_fn(lla.poset(), la.poset(), |ww| {
        let union = bits(lla.mask(ww)).fold(0u64, |acc, w| acc | la.mask(w));
        la.index_of_mask(union)
    })
    .expect("union is monotone"))
}

/// Membership `a in W`, a relation from `LA` to `A`; this is the upper graph
/// of the Yoneda embedding.
pub fn membership(a: &FinPreorder, caps: &Caps) -> Result<MonotoneRelation> {
    let la = Lowersets::new(a, caps)?;
    let mat = BitMatrix::from_fn(a.len(), la.poset().len(), |x, w| la.contains(w, x));
    Ok(MonotoneRelation::trusted(la.poset(), a, mat))
}

/// Elementhood `x in V` for uppersets `V` of `A`: a relation from the
/// uppersets (lowersets of `A^op`) to `A^op`. Equals the upper graph of the
/// Yoneda embedding of `A^op`.
pub fn elementhood(a: &FinPreorder, caps: &Caps) -> Result<MonotoneRelation> {
    membership(&a.opposite(), caps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> FinPreorder {
        FinPreorder::chain(["0", "1"]).unwrap()
    }

    #[test]
    fn bottom_and_top_are_monotone() {
        let a = c2();
        assert!(MonotoneRelation::new(&a, &a, BitMatrix::new(2, 2)).is_ok());
        assert!(MonotoneRelation::new(&a, &a, BitMatrix::full(2, 2)).is_ok());
    }

    #[test]
    fn closure_of_single_entries() {
        let a = c2();
        // R(1, 0): shrinking 1 or growing 0 reaches (0,0),(0,1),(1,1) as well
        let mut m = BitMatrix::new(2, 2);
        m.insert(1, 0);
        let r = MonotoneRelation::monotone_closure(&a, &a, &m).unwrap();
        assert_eq!(r.matrix().count(), 4);
        assert!(MonotoneRelation::new(&a, &a, m).is_err());

        // R(0, 1): already down-up closed
        let mut m = BitMatrix::new(2, 2);
        m.insert(0, 1);
        let r = MonotoneRelation::monotone_closure(&a, &a, &m).unwrap();
        assert_eq!(r.matrix().count(), 1);
        assert!(MonotoneRelation::new(&a, &a, m).is_ok());
    }

    #[test]
    fn units_and_bottom_composition() {
        let a = c2();
        let b = FinPreorder::new(["x", "y", "z"], &[("x", "z")], true).unwrap();
        let r = MonotoneRelation::from_fn(&a, &b, |y, x| y == 0 && x == 1).unwrap();
        assert_eq!(compose_rel(&id_rel(&b), &r).unwrap(), r);
        assert_eq!(compose_rel(&r, &id_rel(&a)).unwrap(), r);
        let bot = MonotoneRelation::bottom(&b, &a);
        assert_eq!(
            compose_rel(&bot, &r).unwrap(),
            MonotoneRelation::bottom(&a, &a)
        );
    }

    #[test]
    fn lower_graph_of_bottom_inclusion() {
        let one = FinPreorder::singleton("*");
        let f = MonotoneMap::constant(&one, &c2(), 0);
        let (lo, up) = diamonds(&f);
        assert!(lo.get_ids("0", "*").unwrap());
        assert!(!lo.get_ids("1", "*").unwrap());
        assert!(up.get_ids("*", "0").unwrap() && up.get_ids("*", "1").unwrap());
        assert!(check_adjoint_pair(&lo, &up).unwrap());
    }

    #[test]
    fn identity_diamonds() {
        let a = c2();
        let (lo, up) = diamonds(&MonotoneMap::identity(&a));
        assert_eq!(lo, id_rel(&a));
        assert_eq!(up, id_rel(&a));
        assert_eq!(adjoint_to_map(&lo, &up).unwrap(), MonotoneMap::identity(&a));
    }

    #[test]
    fn top_pair_is_not_adjoint() {
        let a = c2();
        let d = FinPreorder::discrete(["p", "q"]).unwrap();
        let l = MonotoneRelation::top(&a, &d);
        let r = MonotoneRelation::top(&d, &a);
        assert!(!check_adjoint_pair(&l, &r).unwrap());
        assert_eq!(adjoint_to_map(&l, &r).unwrap_err(), Error::NotAdjointPair);
    }

    #[test]
    fn ambiguous_witness_on_preorder() {
        let one = FinPreorder::singleton("*");
        let cyc = FinPreorder::new(["x", "y"], &[("x", "y"), ("y", "x")], false).unwrap();
        let f = MonotoneMap::constant(&one, &cyc, 1);
        let (lo, up) = diamonds(&f);
        let g = adjoint_to_map(&lo, &up).unwrap();
        assert_eq!(g.apply_id("*").unwrap(), "x");
        assert!(matches!(
            adjoint_to_map_unique(&lo, &up),
            Err(Error::AmbiguousWitness(..))
        ));
    }

    #[test]
    fn forget_copies_matrix() {
        let p = forget_rel(&id_rel(&c2()));
        assert_eq!(p.mat.count(), 3);
    }

    #[test]
    fn dagger_of_identity_and_bottom() {
        let caps = Caps::default();
        let a = c2();
        let d = dagger(&id_rel(&a), &caps).unwrap();
        assert_eq!(d, MonotoneMap::identity(d.dom()));
        let d = dagger(&MonotoneRelation::bottom(&a, &a), &caps).unwrap();
        let empty = d.dom().require("v{}").unwrap();
        assert!(d.table().iter().all(|&t| t == empty));
    }

    #[test]
    fn yoneda_on_singleton() {
        let caps = Caps::default();
        let y = yoneda_unit(&FinPreorder::singleton("*"), &caps).unwrap();
        assert_eq!(y.apply_id("*").unwrap(), "v{*}");
        assert_eq!(y.cod().len(), 2);
    }

    #[test]
    fn elementhood_of_singleton() {
        let e = elementhood(&FinPreorder::singleton("*"), &Caps::default()).unwrap();
        assert_eq!(e.src().len(), 2);
        assert!(e.get_ids("*", "v{*}").unwrap());
        assert!(!e.get_ids("*", "v{}").unwrap());
    }

    #[test]
    fn caps_are_enforced() {
        let big = FinPreorder::discrete((0..17).map(|i| i.to_string())).unwrap();
        assert!(matches!(
            yoneda_unit(&big, &Caps::default()),
            Err(Error::SizeCapExceeded { .. })
        ));
    }
}
