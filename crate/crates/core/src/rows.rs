//! Rows of the polarization matrix, masks and projections.
//!
//! The polarization matrix is the n-fold Kronecker power of the 2x2 kernel
//! `[[1,0],[1,1]]`. Row `j` is the Kronecker product of the kernels picked
//! by the bits of `j`, most significant bit outermost, so its support is
//! exactly the set of positions whose binary representation is contained in
//! `b_j`. Rows are generated on demand and packed 64 positions per word;
//! the full matrix is never materialized except by the debug text dump.

use crate::bits::{BitWord, IndexSet};

/// A binary (row) vector packed into 64-bit words. Unused high bits of the
/// last word are kept at zero so equality and hashing work wordwise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RowVector {
    words: Vec<u64>,
    len: usize,
}

impl RowVector {
    pub fn zero(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Wraps packed words; bits at or above `len` must be zero.
    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), len.div_ceil(64));
        debug_assert!(len % 64 == 0 || words.last().map_or(true, |w| w >> (len % 64) == 0));
        Self { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "position {pos} outside length {}", self.len);
        (self.words[pos / 64] >> (pos % 64)) & 1 == 1
    }

    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(pos < self.len, "position {pos} outside length {}", self.len);
        if value {
            self.words[pos / 64] |= 1 << (pos % 64);
        } else {
            self.words[pos / 64] &= !(1 << (pos % 64));
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in xor_assign");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

impl std::fmt::Debug for RowVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len <= 128 {
            for i in 0..self.len {
                write!(f, "{}", u8::from(self.get(i)))?;
            }
            Ok(())
        } else {
            write!(f, "RowVector(len={}, weight={})", self.len, self.weight())
        }
    }
}

/// Row `j` of the polarization matrix of size `2^n`.
///
/// Built inner-to-outer: appending bit level `l` doubles the vector,
/// copying the prefix when the bit is one and zero-padding otherwise.
pub fn row(n: usize, j: usize) -> RowVector {
    assert!(n <= 30, "n={n} beyond supported range");
    assert!(j < (1usize << n), "row index {j} out of range for n={n}");
    // grow inside one word while the vector fits
    let small_levels = n.min(6);
    let mut word = 1u64;
    let mut len = 1usize;
    for l in 0..small_levels {
        if (j >> l) & 1 == 1 {
            word |= word << len;
        }
        len <<= 1;
    }
    let mut words = vec![word];
    for l in small_levels..n {
        let cur = words.len();
        if (j >> l) & 1 == 1 {
            words.extend_from_within(0..cur);
        } else {
            words.resize(2 * cur, 0);
        }
        len <<= 1;
    }
    RowVector { words, len }
}

/// The positions associated with bit level `level`: indices `k` in `[0, 2^n)`
/// whose binary representation has a one at `level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    pub level: usize,
    pub positions: IndexSet,
}

impl Mask {
    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet::new((0..(1usize << n)).filter(|k| (k >> self.level) & 1 == 0))
    }
}

pub fn mask(n: usize, level: usize) -> Mask {
    assert!(n <= 20, "mask positions are materialized; n={n} is too large");
    assert!(level < n, "level {level} out of range for n={n}");
    let positions = IndexSet::new((0..(1usize << n)).filter(|k| (k >> level) & 1 == 1));
    Mask { level, positions }
}

/// Projection of row `j` onto the intersection of the mask complements of
/// the levels in `removed`: the Kronecker product over the kept levels in
/// descending order. The empty product is the length-1 vector `[1]`.
pub fn projection(n: usize, j: usize, removed: &IndexSet) -> RowVector {
    assert!(j < (1usize << n), "row index {j} out of range for n={n}");
    assert!(
        removed.iter().all(|l| l < n),
        "removed levels must lie in [0, {n})"
    );
    let kept: Vec<usize> = (0..n).filter(|l| !removed.contains(*l)).collect();
    let mut compressed = 0usize;
    for (t, &l) in kept.iter().enumerate() {
        if (j >> l) & 1 == 1 {
            compressed |= 1 << t;
        }
    }
    row(kept.len(), compressed)
}

/// Subvector of `v` at the positions of `s`, in ascending order.
pub fn restrict(v: &RowVector, s: &IndexSet) -> RowVector {
    let mut out = RowVector::zero(s.len());
    for (i, pos) in s.iter().enumerate() {
        if v.get(pos) {
            out.set(i, true);
        }
    }
    out
}

/// Text dump of the dense matrix, one row of 0/1 characters per line.
/// Debug aid only, capped at n <= 6.
pub fn dense_matrix_text(n: usize) -> String {
    assert!(n <= 6, "dense dump capped at n=6");
    let nn = 1usize << n;
    let mut out = String::with_capacity(nn * (nn + 1));
    for j in 0..nn {
        let r = row(n, j);
        for pos in 0..nn {
            out.push(if r.get(pos) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bools(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn row_examples() {
        assert_eq!(row(2, 3).to_bools(), bools("1111"));
        assert_eq!(row(3, 5).to_bools(), bools("11001100"));
        assert_eq!(row(3, 0).to_bools(), bools("10000000"));
    }

    #[test]
    fn row_weight_is_power_of_two_of_ones() {
        for n in 0..=8 {
            for j in 0..(1usize << n) {
                let expect = 1usize << (j.count_ones() as usize);
                assert_eq!(row(n, j).weight(), expect, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn row_support_is_subset_lattice() {
        // position k carries a one iff b_k is contained in b_j
        for n in [3, 5, 7] {
            for j in 0..(1usize << n) {
                let r = row(n, j);
                for k in 0..(1usize << n) {
                    assert_eq!(r.get(k), k & j == k, "n={n} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn last_entry_only_on_bottom_row() {
        for n in 1..=7 {
            let nn = 1usize << n;
            for j in 0..nn {
                assert_eq!(row(n, j).get(nn - 1), j == nn - 1);
            }
        }
    }

    #[test]
    fn regions_recursion() {
        // if bit l of j is one, the slice [2^l, 2^{l+1}) repeats [0, 2^l)
        for n in 2..=7 {
            for j in 0..(1usize << n) {
                let r = row(n, j);
                for l in 0..n {
                    if (j >> l) & 1 == 1 {
                        for p in 0..(1usize << l) {
                            assert_eq!(r.get(p + (1 << l)), r.get(p));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mask_examples() {
        assert_eq!(mask(2, 0).positions, IndexSet::new([1, 3]));
        assert_eq!(mask(2, 1).positions, IndexSet::new([2, 3]));
        assert_eq!(mask(3, 2).positions, IndexSet::new([4, 5, 6, 7]));
        assert_eq!(mask(3, 0).complement(3), IndexSet::new([0, 2, 4, 6]));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(projection(3, 5, &IndexSet::new([0])).to_bools(), bools("1010"));
        assert_eq!(projection(3, 5, &IndexSet::empty()), row(3, 5));
        assert_eq!(projection(3, 5, &IndexSet::new([0, 1, 2])).to_bools(), bools("1"));
    }

    #[test]
    fn restrict_examples() {
        let m0 = mask(3, 0);
        assert_eq!(restrict(&row(3, 5), &m0.positions), projection(3, 5, &IndexSet::new([0])));
        assert!(restrict(&row(3, 2), &m0.positions).is_zero());
        assert_eq!(restrict(&row(3, 5), &IndexSet::empty()).len(), 0);
    }

    #[test]
    fn single_level_projection_identity() {
        // restriction to the mask is zero or the projection depending on the
        // bit, and restriction to the complement is always the projection
        for n in 2..=8 {
            for l in 0..n {
                let m = mask(n, l);
                let mc = m.complement(n);
                for j in 0..(1usize << n) {
                    let r = row(n, j);
                    let proj = projection(n, j, &IndexSet::new([l]));
                    let on_mask = restrict(&r, &m.positions);
                    if (j >> l) & 1 == 0 {
                        assert!(on_mask.is_zero());
                    } else {
                        assert_eq!(on_mask, proj);
                    }
                    assert_eq!(restrict(&r, &mc), proj);
                }
            }
        }
    }

    #[test]
    fn multi_level_projection_identity() {
        // exhaustive over n <= 5: restriction of row j to the region where
        // the levels in b0 are one and the levels in b \ b0 are zero
        for n in 2..=5usize {
            let nn = 1usize << n;
            for b_mask in 0u32..(1 << n) {
                let b: Vec<usize> = (0..n).filter(|l| (b_mask >> l) & 1 == 1).collect();
                let b_set = IndexSet::new(b.iter().copied());
                let mut b0_mask = b_mask;
                loop {
                    for j in 0..nn {
                        let region = IndexSet::new((0..nn).filter(|k| {
                            (k as u32 & b_mask) == b0_mask
                        }));
                        let got = restrict(&row(n, j), &region);
                        let all_one = (j as u32 & b0_mask) == b0_mask;
                        if !all_one {
                            assert!(got.is_zero(), "n={n} j={j} B={b_mask:b} B0={b0_mask:b}");
                        } else {
                            assert_eq!(got, projection(n, j, &b_set));
                        }
                    }
                    if b0_mask == 0 {
                        break;
                    }
                    b0_mask = (b0_mask - 1) & b_mask;
                }
            }
        }
    }

    #[test]
    fn dense_dump_small() {
        let text = dense_matrix_text(2);
        assert_eq!(text, "1000\n1100\n1010\n1111\n");
    }
}
