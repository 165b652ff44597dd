//! Exact Hamming weights of sums of polarization-matrix rows and code
//! weight spectra.
//!
//! Three routes to the same quantity are kept deliberately independent:
//! the closed form over all non-empty sub-subsets (inclusion–exclusion on
//! the common 1-bits of the binary representations), the direct XOR of the
//! generated rows, and a partition lower bound. The spectrum routines give
//! ground truth for small information lengths and a list-decoding search
//! for large ones.

use std::collections::BTreeMap;
use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::bits::{BitWord, IndexSet};
use crate::codec::{self, LlrVector, SclDecoder};
use crate::construct::CodeSpec;
use crate::rows::{row, RowVector};
use crate::{Error, Result};

/// Largest subset size accepted by [`weight_formula`]; the term count is
/// `2^|T|`.
pub const FORMULA_MAX_ROWS: usize = 25;

/// Largest information length accepted by [`spectrum_exhaustive`].
pub const EXHAUSTIVE_MAX_K: usize = 26;

/// A subset of row indices of the size-`2^n` polarization matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowSubset {
    n: usize,
    rows: IndexSet,
}

impl RowSubset {
    pub fn new<I: IntoIterator<Item = usize>>(n: usize, rows: I) -> Self {
        let rows = IndexSet::new(rows);
        assert!(n <= 30, "n={n} beyond supported range");
        if let Some(max) = rows.max() {
            assert!(max < (1usize << n), "row {max} out of range for n={n}");
        }
        Self { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &IndexSet {
        &self.rows
    }
}

/// Closed-form Hamming weight of the XOR of the rows in `subset`:
/// the alternating sum over all non-empty sub-subsets `S` of
/// `(-2)^{|S|-1} * 2^{i1(AND of b_j over S)}`.
pub fn weight_formula(subset: &RowSubset) -> Result<u64> {
    let members: Vec<u32> = subset.rows.iter().map(|j| j as u32).collect();
    if members.is_empty() {
        return Err(Error::EmptySubset);
    }
    if members.len() > FORMULA_MAX_ROWS {
        return Err(Error::SubsetTooLarge {
            len: members.len(),
            limit: FORMULA_MAX_ROWS,
        });
    }
    let all = if subset.n == 32 {
        u32::MAX
    } else {
        (1u32 << subset.n) - 1
    };
    let mut total: i64 = 0;
    // depth-first over non-empty subsets keeping the running AND, so each
    // subset costs O(1)
    fn descend(members: &[u32], start: usize, and_so_far: u32, size: usize, total: &mut i64) {
        for i in start..members.len() {
            let and_next = and_so_far & members[i];
            let size_next = size + 1;
            let term = 1i64 << (size_next - 1 + and_next.count_ones() as usize);
            if size_next % 2 == 1 {
                *total += term;
            } else {
                *total -= term;
            }
            descend(members, i + 1, and_next, size_next, total);
        }
    }
    descend(&members, 0, all, 0, &mut total);
    debug_assert!(total >= 0, "alternating sum went negative");
    Ok(total as u64)
}

/// Brute-force oracle: weight of the bitwise XOR of the generated rows.
/// The weight of an empty subset is 0.
pub fn weight_xor(subset: &RowSubset) -> u64 {
    let mut acc = RowVector::zero(1usize << subset.n);
    for j in subset.rows.iter() {
        acc.xor_assign(&row(subset.n, j));
    }
    acc.weight() as u64
}

/// Partition lower bound: the maximum over bit levels `l` of the weight of
/// the sub-subset of rows whose representation is zero at `l`.
pub fn weight_lower_bound(subset: &RowSubset) -> u64 {
    let mut best = 0u64;
    for l in 0..subset.n {
        let kept: Vec<usize> = subset
            .rows
            .iter()
            .filter(|&j| (j >> l) & 1 == 0)
            .collect();
        if kept.is_empty() {
            continue;
        }
        let w = weight_xor(&RowSubset::new(subset.n, kept));
        best = best.max(w);
    }
    best
}

/// Weight data for a code or a searched fraction of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightReport {
    exact: bool,
    counts: BTreeMap<usize, u64>,
}

impl WeightReport {
    pub fn new(exact: bool) -> Self {
        Self {
            exact,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, weight: usize, count: u64) {
        if count > 0 {
            *self.counts.entry(weight).or_insert(0) += count;
        }
    }

    /// Smallest observed nonzero-codeword weight.
    pub fn min_weight(&self) -> usize {
        self.counts
            .keys()
            .next()
            .copied()
            .expect("empty weight report")
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn count(&self, weight: usize) -> u64 {
        self.counts.get(&weight).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&w, &c)| (w, c))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    fn merge(&mut self, other: &WeightReport) {
        for (w, c) in other.counts() {
            self.record(w, c);
        }
    }
}

impl Serialize for WeightReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            weight: usize,
            count: u64,
        }
        let mut st = serializer.serialize_struct("WeightReport", 3)?;
        st.serialize_field("min_weight", &self.min_weight())?;
        st.serialize_field("exact", &self.exact)?;
        let entries: Vec<Entry> = self
            .counts()
            .map(|(weight, count)| Entry { weight, count })
            .collect();
        st.serialize_field("counts", &entries)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for WeightReport {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Entry {
            weight: usize,
            count: u64,
        }
        #[derive(Deserialize)]
        struct Raw {
            exact: bool,
            counts: Vec<Entry>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut report = WeightReport::new(raw.exact);
        for e in raw.counts {
            report.record(e.weight, e.count);
        }
        Ok(report)
    }
}

/// Exact weight spectrum by enumerating all `2^k - 1` nonzero messages.
///
/// Messages walk in Gray-code order so each step XORs a single basis
/// codeword; ranges are split across threads.
pub fn spectrum_exhaustive(spec: &CodeSpec) -> Result<WeightReport> {
    let k = spec.k();
    if k == 0 {
        return Err(Error::EmptySubset);
    }
    if k > EXHAUSTIVE_MAX_K {
        return Err(Error::InfoTooLarge {
            k,
            limit: EXHAUSTIVE_MAX_K,
        });
    }
    let basis = codec::basis_codewords(spec)?;
    let total: u64 = 1u64 << k;
    let chunk: u64 = (total / (rayon::current_num_threads() as u64 * 8).max(1)).max(1 << 12);
    let starts: Vec<u64> = (1..total).step_by(chunk as usize).collect();
    let report = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(total);
            let mut local = WeightReport::new(true);
            // state at index start: XOR of basis rows picked by gray(start)
            let mut cw = RowVector::zero(spec.block_len());
            let g = start ^ (start >> 1);
            for b in 0..k {
                if (g >> b) & 1 == 1 {
                    cw.xor_assign(&basis[b]);
                }
            }
            local.record(cw.weight(), 1);
            for i in (start + 1)..end {
                let flip = i.trailing_zeros() as usize;
                cw.xor_assign(&basis[flip]);
                local.record(cw.weight(), 1);
            }
            local
        })
        .reduce(
            || WeightReport::new(true),
            |mut a, b| {
                a.merge(&b);
                a
            },
        );
    Ok(report)
}

/// Minimum-weight search by list decoding of noiseless and near-noiseless
/// all-zero observations.
///
/// Trial 0 feeds unit LLRs (under the min-sum penalty metric the final path
/// metric then equals the codeword weight, so the survivors are the list's
/// lowest-weight codewords); later trials jitter the LLR magnitudes with a
/// fixed per-trial seed to shuffle tie-breaking. Counts are the number of
/// distinct codewords seen at each weight, a lower bound on the true
/// spectrum.
pub fn min_weight_list_search(
    spec: &CodeSpec,
    list_size: usize,
    trials: usize,
) -> Result<WeightReport> {
    if list_size < 2 {
        return Err(Error::ListTooSmall);
    }
    let trials = trials.max(1);
    let nn = spec.block_len();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut report = WeightReport::new(false);
    let mut decoder = SclDecoder::new(spec, list_size)?;
    for trial in 0..trials {
        let llr: Vec<f64> = if trial == 0 {
            vec![1.0; nn]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + trial as u64);
            (0..nn).map(|_| 1.0 + 0.02 * gaussian(&mut rng)).collect()
        };
        for result in decoder.decode(&LlrVector::new(llr)) {
            if result.codeword.is_zero() {
                continue;
            }
            if seen.insert(result.codeword.words().to_vec()) {
                report.record(result.codeword.weight(), 1);
            }
        }
    }
    if report.is_empty() {
        return Err(Error::BadSpec(
            "list search found no nonzero codeword".into(),
        ));
    }
    Ok(report)
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller, cosine branch
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..=1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Weight of the sum of the rows indexed by `b`-words, bypassing row
/// materialization. Convenience wrapper used by the theorem harnesses.
pub fn weight_of_indices(n: usize, indices: &[usize]) -> u64 {
    weight_xor(&RowSubset::new(n, indices.iter().copied()))
}

/// `2^{min i1(b_i)}` over an information set: the closed-form minimum
/// distance of a pure polar-like code.
pub fn polar_like_min_distance(n: usize, info_set: &IndexSet) -> usize {
    let min_ones = info_set
        .iter()
        .map(|j| BitWord::new(j as u32, n.max(1)).ones())
        .min()
        .expect("empty information set");
    1usize << min_ones
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_examples() {
        assert_eq!(weight_formula(&RowSubset::new(2, [1, 2])).unwrap(), 2);
        assert_eq!(weight_formula(&RowSubset::new(3, [5])).unwrap(), 4);
        assert_eq!(weight_formula(&RowSubset::new(3, [1, 2, 4])).unwrap(), 4);
        assert_eq!(
            weight_formula(&RowSubset::new(7, [73, 70, 112])).unwrap(),
            20
        );
    }

    #[test]
    fn formula_error_paths() {
        assert!(matches!(
            weight_formula(&RowSubset::new(3, [])),
            Err(Error::EmptySubset)
        ));
        let big = RowSubset::new(5, 0..26usize);
        assert!(matches!(
            weight_formula(&big),
            Err(Error::SubsetTooLarge { .. })
        ));
    }

    #[test]
    fn xor_examples() {
        assert_eq!(weight_xor(&RowSubset::new(2, [3])), 4);
        assert_eq!(weight_xor(&RowSubset::new(2, [1, 2, 3])), 2);
        assert_eq!(weight_xor(&RowSubset::new(3, [])), 0);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(weight_lower_bound(&RowSubset::new(2, [1, 2, 3])), 2);
        assert_eq!(weight_lower_bound(&RowSubset::new(3, [7])), 0);
        assert_eq!(weight_lower_bound(&RowSubset::new(3, [1, 2])), 2);
    }

    #[test]
    fn formula_matches_xor_small_exhaustive() {
        // all subsets of size 1..=3 for n in 2..=4
        for n in 2..=4usize {
            let nn = 1usize << n;
            for a in 0..nn {
                assert_eq!(
                    weight_formula(&RowSubset::new(n, [a])).unwrap(),
                    weight_xor(&RowSubset::new(n, [a]))
                );
                for b in (a + 1)..nn {
                    assert_eq!(
                        weight_formula(&RowSubset::new(n, [a, b])).unwrap(),
                        weight_xor(&RowSubset::new(n, [a, b]))
                    );
                    for c in (b + 1)..nn {
                        assert_eq!(
                            weight_formula(&RowSubset::new(n, [a, b, c])).unwrap(),
                            weight_xor(&RowSubset::new(n, [a, b, c]))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn lower_bound_never_exceeds_weight() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let n = rng.gen_range(2..=6usize);
            let size = rng.gen_range(1..=5usize);
            let rows: Vec<usize> = (0..size).map(|_| rng.gen_range(0..(1usize << n))).collect();
            let subset = RowSubset::new(n, rows);
            if subset.rows().is_empty() {
                continue;
            }
            assert!(weight_lower_bound(&subset) <= weight_xor(&subset));
        }
    }

    #[test]
    fn triangle_inequality_on_packed_vectors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..2000 {
            let len = rng.gen_range(1..=200usize);
            let u = RowVector::from_bools(&(0..len).map(|_| rng.gen()).collect::<Vec<bool>>());
            let v = RowVector::from_bools(&(0..len).map(|_| rng.gen()).collect::<Vec<bool>>());
            let mut x = u.clone();
            x.xor_assign(&v);
            assert!(x.weight() + v.weight() >= u.weight());
        }
    }

    #[test]
    fn report_serialization_shape() {
        let mut r = WeightReport::new(true);
        r.record(4, 14);
        r.record(8, 1);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["min_weight"], 4);
        assert_eq!(json["exact"], true);
        assert_eq!(json["counts"][0]["weight"], 4);
        assert_eq!(json["counts"][0]["count"], 14);
        let back: WeightReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }
}
