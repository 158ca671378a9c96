//! Fixed-width bit vectors with the word-parallel shift-or kernels used by
//! the sumset code.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = BitSet {
            len,
            words: vec![!0; words_for(len)],
        };
        s.trim();
        s
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::new(len);
        for i in idx {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn last(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * WORD + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    fn trim(&mut self) {
        let r = self.len % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// `self |= other << shift`, dropping bits that fall past `self.len()`.
    pub fn or_shifted(&mut self, other: &BitSet, shift: usize) {
        let ws = shift / WORD;
        let bs = shift % WORD;
        let n = self.words.len();
        if ws >= n {
            return;
        }
        for (i, &w) in other.words.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let j = i + ws;
            if j >= n {
                break;
            }
            self.words[j] |= w << bs;
            if bs != 0 && j + 1 < n {
                self.words[j + 1] |= w >> (WORD - bs);
            }
        }
        self.trim();
    }

    /// `self |= other >> shift`.
    pub fn or_shifted_down(&mut self, other: &BitSet, shift: usize) {
        let ws = shift / WORD;
        let bs = shift % WORD;
        let n = self.words.len();
        for j in 0..n {
            let i = j + ws;
            if i >= other.words.len() {
                break;
            }
            let mut w = other.words[i] >> bs;
            if bs != 0 && i + 1 < other.words.len() {
                w |= other.words[i + 1] << (WORD - bs);
            }
            self.words[j] |= w;
        }
        self.trim();
    }

    /// `self |= rotate_left(other, shift)` on the cyclic group of order
    /// `self.len()`. Both sets must have the same length.
    pub fn or_rotated(&mut self, other: &BitSet, shift: usize) {
        debug_assert_eq!(self.len, other.len);
        let n = self.len;
        if n == 0 {
            return;
        }
        let shift = shift % n;
        self.or_shifted(other, shift);
        if shift != 0 {
            self.or_shifted_down(other, n - shift);
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn intersection_count(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    /// Folds a vector of length `>= n` onto `Z/nZ`: bit `i` of the result is
    /// the OR of bits `i, i+n, i+2n, ...`.
    pub fn fold_mod(&self, n: usize) -> BitSet {
        let mut out = BitSet::new(n);
        let mut offset = 0;
        while offset < self.len {
            out.or_shifted_down(self, offset);
            offset += n;
        }
        out
    }

    /// Lexicographic comparison of the sorted member lists.
    pub fn cmp_members(&self, other: &BitSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}
