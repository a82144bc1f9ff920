//! Fixed-width bit sets.
//!
//! Used both for pathway states (bit i = species i present) and for sets of
//! LTS state indices. Two sets of the same width are equal iff bit-identical.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    width: u32,
    words: Box<[u64]>,
}

impl BitSet {
    pub fn new(width: usize) -> Self {
        let nwords = width.div_ceil(64);
        BitSet {
            width: width as u32,
            words: vec![0u64; nwords].into_boxed_slice(),
        }
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(width: usize, ones: I) -> Self {
        let mut s = BitSet::new(width);
        for i in ones {
            s.insert(i);
        }
        s
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.width());
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.width());
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.width());
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.insert(i)
        } else {
            self.remove(i)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `other ⊆ self`.
    pub fn contains_all(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| b & !a == 0)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn subtract(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    pub fn invert(&mut self) {
        for w in self.words.iter_mut() {
            *w = !*w;
        }
        self.clear_tail();
    }

    fn clear_tail(&mut self) {
        let used = self.width() % 64;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Bit string with index 0 printed first.
    pub fn bitstring(&self) -> String {
        (0..self.width())
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSet({})", self.bitstring())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut s = BitSet::new(70);
        assert!(s.is_empty());
        s.insert(0);
        s.insert(69);
        assert!(s.get(0) && s.get(69) && !s.get(1));
        assert_eq!(s.count(), 2);
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![0, 69]);
        s.remove(0);
        assert_eq!(s.count(), 1);
    }

    #[test]
    fn subset_and_union() {
        let a = BitSet::from_ones(10, [1, 3, 5]);
        let b = BitSet::from_ones(10, [1, 5]);
        assert!(a.contains_all(&b));
        assert!(!b.contains_all(&a));
        assert!(a.intersects(&b));

        let mut c = b.clone();
        c.union_with(&a);
        assert_eq!(c, a);
        c.subtract(&b);
        assert_eq!(c.ones().collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn invert_keeps_width() {
        let mut s = BitSet::from_ones(65, [0, 64]);
        s.invert();
        assert_eq!(s.count(), 63);
        assert!(!s.get(0) && !s.get(64) && s.get(1));
    }

    #[test]
    fn equality_is_bit_identical() {
        let a = BitSet::from_ones(8, [2]);
        let b = BitSet::from_ones(8, [2]);
        assert_eq!(a, b);
        let c = BitSet::from_ones(9, [2]);
        assert_ne!(a.width(), c.width());
    }
}
