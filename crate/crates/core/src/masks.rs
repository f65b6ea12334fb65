//! Subsets of small carriers as `u64` masks.

use crate::order::FinPreorder;

/// Per-element principal down-sets and up-sets of a carrier with at most 63 elements.
#[derive(Clone, Debug)]
pub(crate) struct MaskOrder {
    pub down: Vec<u64>,
    pub up: Vec<u64>,
}

impl MaskOrder {
    pub fn new(a: &FinPreorder) -> Self {
        debug_assert!(a.len() <= 63);
        let n = a.len();
        let mut down = vec![0u64; n];
        let mut up = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                if a.leq(j, i) {
                    down[i] |= 1 << j;
                }
                if a.leq(i, j) {
                    up[i] |= 1 << j;
                }
            }
        }
        MaskOrder { down, up }
    }

    pub fn down_closure(&self, mask: u64) -> u64 {
        bits(mask).fold(0, |acc, i| acc | self.down[i])
    }

    pub fn up_closure(&self, mask: u64) -> u64 {
        bits(mask).fold(0, |acc, i| acc | self.up[i])
    }

    /// Betweenness closure `{y | x <= y <= z, x,z in mask}`.
    pub fn convex_hull(&self, mask: u64) -> u64 {
        self.down_closure(mask) & self.up_closure(mask)
    }

    /// Egli-Milner comparison: every member of `x` lies below a member of `y`
    /// and every member of `y` lies above a member of `x`.
    pub fn egli_milner(&self, x: u64, y: u64) -> bool {
        x & !self.down_closure(y) == 0 && y & !self.up_closure(x) == 0
    }
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(i)
    })
}

/// All down-closed masks, in increasing numeric order.
///
/// Strongly connected components are decided as units in order of increasing
/// down-set size, so the search only visits actual lowersets.
pub(crate) fn lowerset_masks(a: &FinPreorder) -> Vec<u64> {
    let ord = MaskOrder::new(a);
    let n = a.len();
    // group equivalent elements
    let mut units: Vec<u64> = Vec::new();
    let mut seen = 0u64;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (ord.down[i].count_ones(), i));
    for &i in &order {
        if seen >> i & 1 == 1 {
            continue;
        }
        let class = ord.down[i] & ord.up[i];
        seen |= class;
        units.push(class);
    }
    let below: Vec<u64> = units
        .iter()
        .map(|&u| bits(u).fold(0, |acc, i| acc | ord.down[i]) & !u)
        .collect();

    let mut out = Vec::new();
    fn go(k: usize, cur: u64, units: &[u64], below: &[u64], out: &mut Vec<u64>) {
        if k == units.len() {
            out.push(cur);
            return;
        }
        go(k + 1, cur, units, below, out);
        if below[k] & !cur == 0 {
            go(k + 1, cur | units[k], units, below, out);
        }
    }
    go(0, 0, &units, &below, &mut out);
    out.sort_unstable();
    out
}

pub(crate) fn upperset_masks(a: &FinPreorder) -> Vec<u64> {
    lowerset_masks(&a.opposite())
}

/// Renders a subset as `prefix{a,b,...}` with members sorted by id.
pub(crate) fn render_set(prefix: &str, ids: impl IntoIterator<Item = String>) -> String {
    let mut ids: Vec<String> = ids.into_iter().collect();
    ids.sort();
    format!("{prefix}{{{}}}", ids.join(","))
}

pub(crate) fn render_mask(prefix: &str, a: &FinPreorder, mask: u64) -> String {
    render_set(prefix, bits(mask).map(|i| a.id(i).to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_lowersets(a: &FinPreorder) -> Vec<u64> {
        let ord = MaskOrder::new(a);
        (0..1u64 << a.len())
            .filter(|&m| ord.down_closure(m) == m)
            .collect()
    }

    #[test]
    fn lowerset_search_matches_brute_force() {
        let fixtures = vec![
            FinPreorder::chain(["0", "1", "2"]).unwrap(),
            FinPreorder::discrete(["a", "b", "c"]).unwrap(),
            FinPreorder::new(["a", "b", "c"], &[("a", "c"), ("b", "c")], true).unwrap(),
            FinPreorder::new(["x", "y", "z"], &[("x", "y"), ("y", "x")], false).unwrap(),
            FinPreorder::new(
                ["p", "q", "r", "s"],
                &[("p", "q"), ("q", "p"), ("q", "r"), ("s", "r")],
                false,
            )
            .unwrap(),
            FinPreorder::empty(),
        ];
        for a in &fixtures {
            assert_eq!(lowerset_masks(a), brute_lowersets(a), "{a:?}");
        }
    }

    #[test]
    fn hull_and_egli_milner_on_chain() {
        let c3 = FinPreorder::chain(["0", "1", "2"]).unwrap();
        let ord = MaskOrder::new(&c3);
        assert_eq!(ord.convex_hull(0b101), 0b111);
        assert!(ord.egli_milner(0b001, 0b100));
        assert!(!ord.egli_milner(0b100, 0b001));
        assert!(ord.egli_milner(0, 0));
        assert!(!ord.egli_milner(0, 0b1));
        assert!(!ord.egli_milner(0b1, 0));
    }
}
