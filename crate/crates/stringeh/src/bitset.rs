//! Fixed-universe bitset used for vertex sets and adjacency rows.
//!
//! Every set knows the size of its universe (`0..universe`); binary
//! operations require both operands to share it. Bits above the universe
//! are kept zero so popcounts and equality stay exact.

const WORD_BITS: usize = 64;

/// A subset of `0..universe` backed by `u64` words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
    universe: usize,
}

impl VertexSet {
    /// Empty set over `0..universe`.
    pub fn empty(universe: usize) -> Self {
        let words = vec![0u64; universe.div_ceil(WORD_BITS)];
        VertexSet { words, universe }
    }

    /// Full set `{0, …, universe-1}`.
    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * WORD_BITS;
            let hi = (lo + WORD_BITS).min(universe);
            if hi > lo {
                *w = mask_upto(hi - lo);
            }
        }
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, it: I) -> Self {
        let mut s = Self::empty(universe);
        for v in it {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < self.universe, "index {v} out of universe {}", self.universe);
        self.words[v / WORD_BITS] |= 1u64 << (v % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        debug_assert!(v < self.universe);
        self.words[v / WORD_BITS] &= !(1u64 << (v % WORD_BITS));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        debug_assert!(v < self.universe);
        (self.words[v / WORD_BITS] >> (v % WORD_BITS)) & 1 == 1
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `|self ∩ other|` without allocating.
    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        debug_assert_eq!(self.universe, other.universe);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.subtract(other);
        s
    }

    /// Complement within the universe.
    pub fn complement(&self) -> VertexSet {
        let mut s = Self::empty(self.universe);
        for (i, (out, w)) in s.words.iter_mut().zip(&self.words).enumerate() {
            let lo = i * WORD_BITS;
            let hi = (lo + WORD_BITS).min(self.universe);
            *out = !w & mask_upto(hi - lo);
        }
        s
    }

    /// Smallest element, if any.
    pub fn first(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i * WORD_BITS;
            BitIter { word: w, base }
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

struct BitIter {
    word: u64,
    base: usize,
}

impl Iterator for BitIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

#[inline]
fn mask_upto(bits: usize) -> u64 {
    debug_assert!(bits <= WORD_BITS);
    if bits == WORD_BITS {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VertexSet {
    /// Collects indices into a set whose universe is `max + 1`.
    /// Prefer [`VertexSet::from_indices`] when the universe is known.
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let items: Vec<usize> = it.into_iter().collect();
        let universe = items.iter().max().map_or(0, |m| m + 1);
        Self::from_indices(universe, items)
    }
}
