//! Bit-index algebra over the n-bit binary representations of row indices.
//!
//! Every structural argument about the polarization matrix reduces to set
//! algebra on the binary representation `b_j` of a row index `j < 2^n`.
//! [`BitWord`] carries that representation together with its width
//! (bit 0 is the least significant bit), and [`IndexSet`] is the shared
//! sorted-set type used both for bit levels in `[0, n)` and for codeword
//! positions in `[0, N)`.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest supported width of a [`BitWord`].
pub const MAX_WIDTH: usize = 30;

/// An `n`-bit binary representation of a row index.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitWord {
    value: u32,
    width: u8,
}

impl BitWord {
    /// Wraps `value` as a `width`-bit word.
    ///
    /// Panics if `width` is outside `1..=MAX_WIDTH` or `value` does not fit.
    pub fn new(value: u32, width: usize) -> Self {
        assert!(
            (1..=MAX_WIDTH).contains(&width),
            "width {width} out of range 1..={MAX_WIDTH}"
        );
        assert!(
            value < (1u32 << width),
            "value {value} does not fit in {width} bits"
        );
        Self {
            value,
            width: width as u8,
        }
    }

    /// Builds a word of width `width` whose support is `levels`.
    pub fn from_support<I: IntoIterator<Item = usize>>(levels: I, width: usize) -> Self {
        let mut value = 0u32;
        for l in levels {
            assert!(l < width, "level {l} outside width {width}");
            value |= 1 << l;
        }
        Self::new(value, width)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    /// Value of the bit at level `l` (level 0 is the least significant bit).
    pub fn bit(self, l: usize) -> bool {
        assert!(l < self.width(), "level {l} outside width {}", self.width);
        (self.value >> l) & 1 == 1
    }

    /// Number of 1 bits (`i1`).
    pub fn ones(self) -> usize {
        self.value.count_ones() as usize
    }

    /// Number of 0 bits (`i0`).
    pub fn zeros(self) -> usize {
        self.width() - self.ones()
    }

    /// Levels holding a 1 (`P1`).
    pub fn support(self) -> IndexSet {
        IndexSet::from_bit_mask(self.value)
    }

    /// Levels holding a 0 (`P0`).
    pub fn zero_support(self) -> IndexSet {
        let mask = if self.width() == 32 {
            !self.value
        } else {
            !self.value & ((1u32 << self.width()) - 1)
        };
        IndexSet::from_bit_mask(mask)
    }

    /// Element-wise AND. Panics on width mismatch.
    pub fn and(self, other: Self) -> Self {
        assert_eq!(self.width, other.width, "width mismatch in and()");
        Self {
            value: self.value & other.value,
            width: self.width,
        }
    }

    /// Element-wise OR. Panics on width mismatch.
    pub fn or(self, other: Self) -> Self {
        assert_eq!(self.width, other.width, "width mismatch in or()");
        Self {
            value: self.value | other.value,
            width: self.width,
        }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Left-circular shift by `theta` levels: the result bit at position `v`
    /// equals the input bit at position `(v - theta) mod n`.
    ///
    /// Panics if `theta >= width`.
    pub fn circular_shift(self, theta: usize) -> Self {
        let n = self.width();
        assert!(theta < n, "shift {theta} must be smaller than width {n}");
        if theta == 0 {
            return self;
        }
        let mask = (1u32 << n) - 1;
        let value = ((self.value << theta) | (self.value >> (n - theta))) & mask;
        Self {
            value,
            width: self.width,
        }
    }

    /// Applies a bit permutation: the result bit at `perm[l]` equals the
    /// input bit at `l`. Panics if `perm` is not a bijection on `[0, n)`.
    pub fn apply_permutation(self, perm: &[usize]) -> Self {
        let n = self.width();
        assert_eq!(perm.len(), n, "permutation length must equal width");
        debug_assert!(is_permutation(perm), "not a bijection on [0, {n})");
        let mut value = 0u32;
        for (l, &target) in perm.iter().enumerate() {
            assert!(target < n, "permutation image {target} outside [0, {n})");
            if (self.value >> l) & 1 == 1 {
                value |= 1 << target;
            }
        }
        Self {
            value,
            width: self.width,
        }
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width())
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Checks that `perm` maps `[0, len)` onto itself bijectively.
pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// A strictly ascending set of non-negative indices.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Builds a set from arbitrary indices (sorted, duplicates removed).
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Set of bit levels set in `mask`.
    pub fn from_bit_mask(mask: u32) -> Self {
        Self((0..32).filter(|l| (mask >> l) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The `i`-th smallest element.
    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.clone()
    }

    /// True iff every element of `self` exceeds every element of `other`.
    /// Vacuously true when either set is empty.
    pub fn dominates(&self, other: &Self) -> bool {
        match (self.min(), other.max()) {
            (Some(lo), Some(hi)) => lo > hi,
            _ => true,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&x| other.contains(x)).collect())
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter)
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        let set = Self::new(v.iter().copied());
        if set.len() != v.len() {
            return Err(D::Error::custom("index set contains duplicates"));
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ones_and_zeros() {
        assert_eq!(BitWord::new(0b101, 3).ones(), 2);
        assert_eq!(BitWord::new(0, 4).ones(), 0);
        assert_eq!(BitWord::new(0b111_1111, 7).ones(), 7);
        assert_eq!(BitWord::new(0b101, 3).zeros(), 1);
    }

    #[test]
    fn support_partition() {
        let b = BitWord::new(0b110, 3);
        assert_eq!(b.support(), IndexSet::new([1, 2]));
        assert_eq!(b.zero_support(), IndexSet::new([0]));
        assert_eq!(BitWord::new(0b101, 3).support(), IndexSet::new([0, 2]));
        assert!(BitWord::new(0, 3).support().is_empty());
    }

    #[test]
    fn and_or() {
        let a = BitWord::new(0b101, 3);
        let b = BitWord::new(0b011, 3);
        assert_eq!(a.and(b).value(), 0b001);
        assert_eq!(a.or(b).value(), 0b111);
        let z = BitWord::new(0, 3);
        assert_eq!(a.and(z).value(), 0);
    }

    #[test]
    #[should_panic(expected = "width mismatch")]
    fn and_width_mismatch_panics() {
        let _ = BitWord::new(1, 3).and(BitWord::new(1, 4));
    }

    #[test]
    fn dominates_relation() {
        let a = IndexSet::new([4, 5]);
        let b = IndexSet::new([0, 1]);
        assert!(a.dominates(&b));
        assert!(!IndexSet::new([0, 3]).dominates(&IndexSet::new([1, 2])));
        assert!(!IndexSet::new([1, 2]).dominates(&IndexSet::new([0, 3])));
        // vacuous on empty sets
        assert!(IndexSet::empty().dominates(&a));
        assert!(a.dominates(&IndexSet::empty()));
        assert!(IndexSet::empty().dominates(&IndexSet::empty()));
    }

    #[test]
    fn dominates_both_ways_needs_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let a = IndexSet::new((0..8).filter(|_| rng.gen::<bool>()));
            let b = IndexSet::new((0..8).filter(|_| rng.gen::<bool>()));
            if a.dominates(&b) && b.dominates(&a) {
                assert!(a.is_empty() || b.is_empty());
            }
        }
    }

    #[test]
    fn circular_shift_examples() {
        assert_eq!(BitWord::new(0b0011, 4).circular_shift(1).value(), 0b0110);
        let b = BitWord::new(0b01011, 5);
        assert_eq!(b.circular_shift(0), b);
        // bits {6,3,0} shifted by one become bits {0,4,1}
        assert_eq!(BitWord::new(73, 7).circular_shift(1).value(), 19);
    }

    #[test]
    fn circular_shift_full_cycle_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=10 {
            for _ in 0..50 {
                let b = BitWord::new(rng.gen_range(0..(1u32 << n)), n);
                let mut s = b;
                for _ in 0..n {
                    s = s.circular_shift(1);
                }
                assert_eq!(s, b);
            }
        }
    }

    #[test]
    fn permutation_examples() {
        let b = BitWord::new(0b001, 3);
        assert_eq!(b.apply_permutation(&[0, 1, 2]), b);
        assert_eq!(b.apply_permutation(&[2, 1, 0]).value(), 0b100);
    }

    #[test]
    fn shift_is_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=8 {
            for theta in 0..n {
                let perm: Vec<usize> = (0..n).map(|l| (l + theta) % n).collect();
                for _ in 0..30 {
                    let b = BitWord::new(rng.gen_range(0..(1u32 << n)), n);
                    assert_eq!(b.circular_shift(theta), b.apply_permutation(&perm));
                }
            }
        }
    }

    #[test]
    fn permutation_preserves_ones() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..=10usize);
            let b = BitWord::new(rng.gen_range(0..(1u32 << n)), n);
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            assert_eq!(b.apply_permutation(&perm).ones(), b.ones());
        }
    }

    #[test]
    fn counting_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let n = rng.gen_range(1..=12usize);
            let a = BitWord::new(rng.gen_range(0..(1u32 << n)), n);
            let b = BitWord::new(rng.gen_range(0..(1u32 << n)), n);
            assert_eq!(a.ones() + a.zeros(), n);
            assert!(a.and(b).ones() <= a.ones().min(b.ones()));
            assert_eq!(a.or(b).ones(), a.ones() + b.ones() - a.and(b).ones());
        }
    }

    #[test]
    fn index_set_order_and_lookup() {
        let s = IndexSet::new([5, 1, 3, 1]);
        assert_eq!(s.as_slice(), &[1, 3, 5]);
        assert_eq!(s.get(0), 1);
        assert_eq!(s.get(2), 5);
        assert!(s.contains(3));
        assert!(!s.contains(2));
    }
}
