//! Packed boolean vectors and matrices.
//!
//! Everything in this crate is a 2-valued matrix at heart: order relations,
//! monotone relations, lifted relations. Rows are stored as `u64` words so
//! that composition and closure work a word at a time.

use std::fmt;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length set of indices `0..len`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = BitSet::new(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::new(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.insert(i)
        } else {
            self.remove(i)
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + bit)
            })
        })
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A `rows x cols` boolean matrix stored row-major as bit rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitSet>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitSet::new(cols); rows],
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitSet::full(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::new(n, n);
        for i in 0..n {
            m.insert(i, i);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BitMatrix::new(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.insert(r, c);
                }
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<bool>], cols: usize) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(BitMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].contains(c)
    }

    #[inline]
    pub fn insert(&mut self, r: usize, c: usize) {
        self.data[r].insert(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &BitSet {
        &self.data[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut BitSet {
        &mut self.data[r]
    }

    pub fn column(&self, c: usize) -> BitSet {
        BitSet::from_indices(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn count(&self) -> usize {
        self.data.iter().map(BitSet::count).sum()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::new(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.data[r].iter() {
                t.insert(c, r);
            }
        }
        t
    }

    /// Boolean product: `(self * rhs)[r][c] = OR_k self[r][k] AND rhs[k][c]`.
    pub fn product(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shapes do not compose");
        let mut out = BitMatrix::new(self.rows, rhs.cols);
        for r in 0..self.rows {
            let acc = &mut out.data[r];
            for k in self.data[r].iter() {
                acc.union_with(&rhs.data[k]);
            }
        }
        out
    }

    pub fn is_subset(&self, other: &BitMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.is_subset(b))
    }

    pub fn intersect_with(&mut self, other: &BitMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.intersect_with(b);
        }
    }

    pub fn union_with(&mut self, other: &BitMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.union_with(b);
        }
    }

    /// Reflexive-transitive closure of a square matrix (Warshall, word-parallel).
    pub fn reflexive_transitive_closure(&self) -> BitMatrix {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        for i in 0..m.rows {
            m.insert(i, i);
        }
        for k in 0..m.rows {
            let row_k = m.data[k].clone();
            for i in 0..m.rows {
                if m.get(i, k) {
                    m.data[i].union_with(&row_k);
                }
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<bool>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c)).collect())
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_iter_crosses_word_boundary() {
        let s = BitSet::from_indices(130, [0, 63, 64, 129]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(s.count(), 4);
    }

    #[test]
    fn product_matches_naive() {
        let a = BitMatrix::from_fn(3, 4, |r, c| (r + c) % 3 == 0);
        let b = BitMatrix::from_fn(4, 2, |r, c| r == c || r == 3);
        let p = a.product(&b);
        for r in 0..3 {
            for c in 0..2 {
                let naive = (0..4).any(|k| a.get(r, k) && b.get(k, c));
                assert_eq!(p.get(r, c), naive);
            }
        }
    }

    #[test]
    fn closure_of_chain_pairs() {
        let mut m = BitMatrix::new(3, 3);
        m.insert(0, 1);
        m.insert(1, 2);
        let c = m.reflexive_transitive_closure();
        assert!(c.get(0, 2));
        assert!(!c.get(2, 0));
        assert_eq!(c.count(), 6);
    }
}
