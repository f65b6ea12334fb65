//! Exhaustive enumeration and seeded random generation of small fixtures.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitMatrix;
use crate::order::{FinPreorder, MonotoneMap};
use crate::rel::MonotoneRelation;

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Every preorder on the ids `prefix0 .. prefix{n-1}`.
pub fn all_preorders(prefix: &str, n: usize) -> Vec<FinPreorder> {
    assert!(n <= 4, "enumeration is only feasible for tiny carriers");
    let off: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let mut out = Vec::new();
    for bitsel in 0..1u32 << off.len() {
        let mut m = BitMatrix::identity(n);
        for (k, &(i, j)) in off.iter().enumerate() {
            if bitsel >> k & 1 == 1 {
                m.insert(i, j);
            }
        }
        if m.reflexive_transitive_closure() == m {
            out.push(FinPreorder::from_matrix(names(prefix, n), &m).expect("fresh ids"));
        }
    }
    out
}

pub fn all_posets(prefix: &str, n: usize) -> Vec<FinPreorder> {
    all_preorders(prefix, n)
        .into_iter()
        .filter(FinPreorder::is_poset)
        .collect()
}

/// Every monotone map `a -> b`.
pub fn all_monotone_maps(a: &FinPreorder, b: &FinPreorder) -> Vec<MonotoneMap> {
    let (n, m) = (a.len(), b.len());
    if n > 0 && m == 0 {
        return Vec::new();
    }
    let total = (m as u64).pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let table = (0..n)
                .map(|_| {
                    let v = (code % m as u64) as usize;
                    code /= m as u64;
                    v
                })
                .collect();
            MonotoneMap::new(a, b, table).ok()
        })
        .collect()
}

/// Every monotone relation `a -/-> b`.
pub fn all_monotone_relations(a: &FinPreorder, b: &FinPreorder) -> Vec<MonotoneRelation> {
    let cells = a.len() * b.len();
    assert!(
        cells <= 16,
        "enumeration is only feasible for tiny carriers"
    );
    (0..1u32 << cells)
        .filter_map(|code| {
            let mat =
                BitMatrix::from_fn(b.len(), a.len(), |y, x| code >> (y * a.len() + x) & 1 == 1);
            MonotoneRelation::new(a, b, mat).ok()
        })
        .collect()
}

/// A random preorder with `n` elements. Posets are drawn as random
/// suborders of the index order; preorders may contain cycles.
pub fn random_preorder(rng: &mut FixtureRng, prefix: &str, n: usize, poset: bool) -> FinPreorder {
    let density = rng.gen_range(0.0..0.6);
    let mut m = BitMatrix::new(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j || (poset && i > j) {
                continue;
            }
            if rng.gen_bool(density) {
                m.insert(i, j);
            }
        }
    }
    if poset {
        // relabel so that the order is not always a suborder of the ids
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let shuffled = BitMatrix::from_fn(n, n, |i, j| m.get(perm[i], perm[j]));
        FinPreorder::from_matrix(names(prefix, n), &shuffled).expect("fresh ids")
    } else {
        FinPreorder::from_matrix(names(prefix, n), &m).expect("fresh ids")
    }
}

/// A random monotone map, or a constant map if sampling keeps failing.
/// Returns `None` only when `b` is empty and `a` is not.
pub fn random_map(rng: &mut FixtureRng, a: &FinPreorder, b: &FinPreorder) -> Option<MonotoneMap> {
    if b.is_empty() {
        return MonotoneMap::new(a, b, vec![]).ok().filter(|_| a.is_empty());
    }
    for _ in 0..64 {
        let table = (0..a.len()).map(|_| rng.gen_range(0..b.len())).collect();
        if let Ok(f) = MonotoneMap::new(a, b, table) {
            return Some(f);
        }
    }
    Some(MonotoneMap::constant(a, b, rng.gen_range(0..b.len())))
}

/// The monotone closure of a few random pairs.
pub fn random_relation(rng: &mut FixtureRng, a: &FinPreorder, b: &FinPreorder) -> MonotoneRelation {
    let mut m = BitMatrix::new(b.len(), a.len());
    if !a.is_empty() && !b.is_empty() {
        let seeds = rng.gen_range(0..=a.len().max(b.len()));
        for _ in 0..seeds {
            m.insert(rng.gen_range(0..b.len()), rng.gen_range(0..a.len()));
        }
    }
    MonotoneRelation::monotone_closure(a, b, &m).expect("shape matches")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_of_small_preorders() {
        // labeled preorders and posets on 0..3 elements
        let pre: Vec<usize> = (0..4).map(|n| all_preorders("x", n).len()).collect();
        let pos: Vec<usize> = (0..4).map(|n| all_posets("x", n).len()).collect();
        assert_eq!(pre, [1, 1, 4, 29]);
        assert_eq!(pos, [1, 1, 3, 19]);
    }

    #[test]
    fn monotone_maps_between_chains() {
        let c2 = FinPreorder::chain(["0", "1"]).unwrap();
        assert_eq!(all_monotone_maps(&c2, &c2).len(), 3);
        let c3 = FinPreorder::chain(["0", "1", "2"]).unwrap();
        assert_eq!(all_monotone_maps(&c3, &c3).len(), 10);
    }

    #[test]
    fn monotone_relations_on_chain() {
        // lowersets of C2^op x C2, a 4-element poset with 6 down-sets
        let c2 = FinPreorder::chain(["0", "1"]).unwrap();
        assert_eq!(all_monotone_relations(&c2, &c2).len(), 6);
    }

    #[test]
    fn random_generation_is_seeded() {
        let mut r1 = rng(3);
        let mut r2 = rng(3);
        let a = random_preorder(&mut r1, "a", 4, true);
        let b = random_preorder(&mut r2, "a", 4, true);
        assert_eq!(a, b);
        assert!(a.is_poset());
        assert_eq!(
            random_relation(&mut r1, &a, &a),
            random_relation(&mut r2, &b, &b)
        );
    }
}
