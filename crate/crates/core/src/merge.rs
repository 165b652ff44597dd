//! Admissible row triples, their canonical form and shift ensembles.
//!
//! A triple (i, j, k) of row indices can encode one extra information bit
//! without lowering the minimum distance of the surrounding code when its
//! binary representations are either pairwise non-overlapping with k of
//! weight two, or share exactly the same non-empty common 1-positions with
//! k extending them by two. Canonicalizing a triple rearranges bit levels
//! so that consecutive left-circular shifts yield further disjoint triples,
//! up to the shift budget kappa.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bits::{is_permutation, BitWord, IndexSet};
use crate::{Error, Result};

/// Outcome of the admissibility test for one (i, j, k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TripleCheck {
    Disjoint,
    Intersecting,
    Invalid(String),
}

/// Class of a validated triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TripleClass {
    Disjoint,
    Intersecting,
}

/// Classifies (i, j, k); the first violated condition is reported as
/// `Invalid` with its description.
pub fn check_triple(n: usize, i: usize, j: usize, k: usize) -> TripleCheck {
    let nn = 1usize << n;
    if i >= nn || j >= nn || k >= nn {
        return TripleCheck::Invalid(format!("indices must be below 2^{n}"));
    }
    if i == j || i == k || j == k {
        return TripleCheck::Invalid("indices must be pairwise distinct".into());
    }
    let bi = BitWord::new(i as u32, n);
    let bj = BitWord::new(j as u32, n);
    let bk = BitWord::new(k as u32, n);
    if bi.ones() != bj.ones() {
        return TripleCheck::Invalid(format!(
            "i and j must have equal weight, got {} and {}",
            bi.ones(),
            bj.ones()
        ));
    }
    let level = bi.ones();
    let aij = bi.and(bj);
    let aik = bi.and(bk);
    let ajk = bj.and(bk);
    if aij.is_zero() && aik.is_zero() && ajk.is_zero() {
        if level < 2 {
            return TripleCheck::Invalid(format!(
                "disjoint triple needs weight(i) = weight(j) >= 2, got {level}"
            ));
        }
        if bk.ones() != 2 {
            return TripleCheck::Invalid(format!(
                "disjoint triple needs weight(k) = 2, got {}",
                bk.ones()
            ));
        }
        TripleCheck::Disjoint
    } else {
        if aij != aik || aij != ajk || aij.is_zero() {
            return TripleCheck::Invalid(
                "pairwise common 1-positions must be equal and non-empty".into(),
            );
        }
        let w = aij.ones();
        if bk.ones() != w + 2 {
            return TripleCheck::Invalid(format!(
                "weight(k) must be |W|+2 = {}, got {}",
                w + 2,
                bk.ones()
            ));
        }
        if level < bk.ones() {
            return TripleCheck::Invalid(format!(
                "weight(i) = {level} must be at least weight(k) = {}",
                bk.ones()
            ));
        }
        TripleCheck::Intersecting
    }
}

/// A validated merge triple together with its derived shift quantities:
/// the common 1-positions W, the zero count t0 of the union, the one count
/// t1 of the triple AND, and the shift budget kappa.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeTriple {
    n: usize,
    i: usize,
    j: usize,
    k: usize,
    class: TripleClass,
    common: IndexSet,
    t0: usize,
    t1: usize,
    kappa: usize,
}

impl MergeTriple {
    /// Validates and normalizes (i < j; k keeps its role).
    pub fn new(n: usize, i: usize, j: usize, k: usize) -> Result<Self> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let class = match check_triple(n, i, j, k) {
            TripleCheck::Disjoint => TripleClass::Disjoint,
            TripleCheck::Intersecting => TripleClass::Intersecting,
            TripleCheck::Invalid(reason) => return Err(Error::InvalidTriple { reason }),
        };
        let bi = BitWord::new(i as u32, n);
        let bj = BitWord::new(j as u32, n);
        let bk = BitWord::new(k as u32, n);
        let common = bi.and(bj).support();
        let t0 = bi.or(bj).or(bk).zeros();
        let t1 = bi.and(bj).and(bk).ones();
        let kappa = if t1 > 0 { t0 + t1 } else { t1 };
        Ok(Self {
            n,
            i,
            j,
            k,
            class,
            common,
            t0,
            t1,
            kappa,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> [usize; 3] {
        [self.i, self.j, self.k]
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn class(&self) -> TripleClass {
        self.class
    }

    pub fn common(&self) -> &IndexSet {
        &self.common
    }

    pub fn t0(&self) -> usize {
        self.t0
    }

    pub fn t1(&self) -> usize {
        self.t1
    }

    /// Shift budget `t0 * [t1 > 0] + t1`.
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// The triple with every member left-circular shifted by `theta`.
    pub fn shifted(&self, theta: usize) -> Self {
        let s = |x: usize| {
            BitWord::new(x as u32, self.n)
                .circular_shift(theta % self.n)
                .value() as usize
        };
        Self::new(self.n, s(self.i), s(self.j), s(self.k))
            .expect("shifting preserves triple validity")
    }

    /// The triple with `perm` applied to every member's representation.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let p = |x: usize| BitWord::new(x as u32, self.n).apply_permutation(perm).value() as usize;
        Self::new(self.n, p(self.i), p(self.j), p(self.k))
            .expect("permutation preserves triple validity")
    }

    fn word(&self, x: usize) -> BitWord {
        BitWord::new(x as u32, self.n)
    }

    /// True when the triple already satisfies the canonical-form clauses.
    pub fn is_canonical(&self) -> bool {
        let (bi, bj, bk) = (self.word(self.i), self.word(self.j), self.word(self.k));
        let union = bi.or(bj).or(bk);
        let and3 = bi.and(bj).and(bk);
        let w = bi.and(bj).support();
        let union_p1 = union.support();
        // union 1-positions above its 0-positions
        if !union_p1.dominates(&union.zero_support()) {
            return false;
        }
        // common positions above the rest of the union
        let and_p1 = and3.support();
        if !and_p1.dominates(&union_p1.difference(&and_p1)) {
            return false;
        }
        // k extras above i and j extras
        let ei = bi.support().difference(&w);
        let ej = bj.support().difference(&w);
        let ek = bk.support().difference(&w);
        if !ek.dominates(&ej) || !ek.dominates(&ei) {
            return false;
        }
        // i and j extras interleave
        if ei.dominates(&ej) || ej.dominates(&ei) {
            return false;
        }
        true
    }
}

impl Serialize for MergeTriple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("MergeTriple", 9)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("i", &self.i)?;
        st.serialize_field("j", &self.j)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("class", &self.class)?;
        st.serialize_field("W", &self.common)?;
        st.serialize_field("t0", &self.t0)?;
        st.serialize_field("t1", &self.t1)?;
        st.serialize_field("kappa", &self.kappa)?;
        st.end()
    }
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next_permutation
        let Some(pivot) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let swap = (pivot + 1..n).rev().find(|&i| cur[i] > cur[pivot]).unwrap();
        cur.swap(pivot, swap);
        cur[pivot + 1..].reverse();
    }
    out
}

/// Brings a valid triple to canonical form.
///
/// If the triple already satisfies the clauses it is returned unchanged
/// with the identity permutation; otherwise all `n!` bit permutations are
/// searched (n <= 8) and the lexicographically smallest satisfying
/// (i, j, k) wins, ties on the permutation vector itself.
pub fn canonicalize(triple: &MergeTriple) -> Result<(MergeTriple, Vec<usize>)> {
    let n = triple.n;
    if triple.is_canonical() {
        return Ok((triple.clone(), (0..n).collect()));
    }
    if n > 8 {
        return Err(Error::Unsupported(format!(
            "canonical search is exhaustive over n! permutations and capped at n = 8, got n = {n}"
        )));
    }
    let mut best: Option<(MergeTriple, Vec<usize>)> = None;
    for perm in permutations(n) {
        let cand = triple.permuted(&perm);
        if !cand.is_canonical() {
            continue;
        }
        let key = cand.members();
        match &best {
            Some((b, bp)) if (key, &perm) >= (b.members(), bp) => {}
            _ => best = Some((cand, perm)),
        }
    }
    best.ok_or(Error::CanonicalUnsat {
        clause: "the extra 1-positions of i and j cannot interleave \
                 (each carries exactly one extra position)",
    })
}

/// A canonical triple with its consecutive left-circular shifts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleEnsemble {
    base: MergeTriple,
    shifts: Vec<usize>,
    triples: Vec<MergeTriple>,
}

impl TripleEnsemble {
    pub fn base(&self) -> &MergeTriple {
        &self.base
    }

    pub fn shifts(&self) -> &[usize] {
        &self.shifts
    }

    pub fn triples(&self) -> &[MergeTriple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// All 3m member indices.
    pub fn members(&self) -> Vec<usize> {
        self.triples.iter().flat_map(|t| t.members()).collect()
    }

    /// The ensemble with one bit permutation applied to every triple.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            base: self.base.permuted(perm),
            shifts: self.shifts.clone(),
            triples: self.triples.iter().map(|t| t.permuted(perm)).collect(),
        }
    }
}

impl Serialize for TripleEnsemble {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TripleEnsemble", 10)?;
        st.serialize_field("n", &self.base.n)?;
        st.serialize_field("i", &self.base.i)?;
        st.serialize_field("j", &self.base.j)?;
        st.serialize_field("k", &self.base.k)?;
        st.serialize_field("class", &self.base.class)?;
        st.serialize_field("W", &self.base.common)?;
        st.serialize_field("t0", &self.base.t0)?;
        st.serialize_field("t1", &self.base.t1)?;
        st.serialize_field("kappa", &self.base.kappa)?;
        st.serialize_field("shifts", &self.shifts)?;
        st.end()
    }
}

/// Builds the ensemble of `m` triples, shifts theta = 0..m-1 of the
/// canonical `triple`. Errors when `m` exceeds kappa + 1.
pub fn ensemble(triple: &MergeTriple, m: usize) -> Result<TripleEnsemble> {
    assert!(m >= 1, "ensemble needs at least one triple");
    if !triple.is_canonical() {
        return Err(Error::InvalidTriple {
            reason: "ensemble requires a canonical triple".into(),
        });
    }
    let max = triple.kappa + 1;
    if m > max {
        return Err(Error::EnsembleTooLarge { m, max });
    }
    let shifts: Vec<usize> = (0..m).collect();
    let triples: Vec<MergeTriple> = shifts.iter().map(|&t| triple.shifted(t)).collect();
    let mut all: Vec<usize> = triples.iter().flat_map(|t| t.members()).collect();
    all.sort_unstable();
    all.dedup();
    if all.len() != 3 * m {
        return Err(Error::BadSpec(
            "shifted triples collide; ensemble members are not distinct".into(),
        ));
    }
    Ok(TripleEnsemble {
        base: triple.clone(),
        shifts,
        triples,
    })
}

/// All valid triples with i < j of weight `level`, ascending (i, j, k).
pub fn enumerate_triples(n: usize, level: usize) -> Vec<MergeTriple> {
    assert!(n <= 12, "enumeration capped at n = 12");
    assert!(level >= 2, "triples need row-index weight at least 2");
    let nn = 1usize << n;
    let layer: Vec<usize> = (0..nn)
        .filter(|j| (*j as u32).count_ones() as usize == level)
        .collect();
    let mut out: Vec<MergeTriple> = Vec::new();
    for (a, &i) in layer.iter().enumerate() {
        for &j in &layer[a + 1..] {
            let union = i | j;
            let w = (i & j).count_ones() as usize;
            let free: Vec<usize> = (0..n).filter(|l| (union >> l) & 1 == 0).collect();
            // candidate k rows share exactly the common positions of i and j
            // and pick two further levels outside the union
            for (x, &p) in free.iter().enumerate() {
                for &q in &free[x + 1..] {
                    let k = (i & j) | (1 << p) | (1 << q);
                    if w > 0 && level < w + 2 {
                        continue;
                    }
                    if let Ok(t) = MergeTriple::new(n, i, j, k) {
                        out.push(t);
                    }
                }
            }
        }
    }
    out.sort_by_key(|t| t.members());
    out
}

/// Greedy pair selection for the pre-transform: t runs over the weight
/// `level+1` rows in descending index order and takes the largest unused
/// v > t of weight `level` with the requested support overlap. Indices in
/// `excluded` never participate.
pub fn select_pairs(
    n: usize,
    level: usize,
    overlap: usize,
    excluded: &IndexSet,
) -> Vec<(usize, usize)> {
    assert!(level >= 1, "pairs need row-index weight at least 1");
    assert!(overlap <= 1, "overlap is 0 or 1");
    let nn = 1usize << n;
    let uppers: Vec<usize> = (0..nn)
        .rev()
        .filter(|j| (*j as u32).count_ones() as usize == level + 1 && !excluded.contains(*j))
        .collect();
    let mut used = vec![false; nn];
    let mut pairs = Vec::new();
    for &t in &uppers {
        let found = (t + 1..nn).rev().find(|&v| {
            (v as u32).count_ones() as usize == level
                && !used[v]
                && !excluded.contains(v)
                && (t & v).count_ones() as usize == overlap
        });
        if let Some(v) = found {
            used[v] = true;
            used[t] = true;
            pairs.push((t, v));
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{weight_of_indices, weight_xor, RowSubset};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn check_examples() {
        // n = 7 admits no weight-3 disjoint triple (needs 8 levels)
        assert!(matches!(
            check_triple(7, 0b0000111, 0b0111000, 0b1100000),
            TripleCheck::Invalid(_)
        ));
        assert!(matches!(
            check_triple(8, 7, 56, 192),
            TripleCheck::Disjoint
        ));
        assert!(matches!(
            check_triple(7, 73, 70, 112),
            TripleCheck::Intersecting
        ));
        match check_triple(7, 73, 70, 96) {
            TripleCheck::Invalid(reason) => assert!(reason.contains("|W|+2")),
            other => panic!("expected invalid, got {other:?}"),
        }
    }

    #[test]
    fn triple_quantities() {
        let t = MergeTriple::new(7, 73, 70, 112).unwrap();
        assert_eq!(t.members(), [70, 73, 112]); // i < j normalization
        assert_eq!(t.common(), &IndexSet::new([6]));
        assert_eq!(t.t0(), 0);
        assert_eq!(t.t1(), 1);
        assert_eq!(t.kappa(), 1);

        let d = MergeTriple::new(8, 56, 7, 192).unwrap();
        assert_eq!(d.members(), [7, 56, 192]);
        assert_eq!(d.class(), TripleClass::Disjoint);
        assert_eq!(d.t0(), 0);
        assert_eq!(d.t1(), 0);
        assert_eq!(d.kappa(), 0);
    }

    #[test]
    fn canonical_fixed_point() {
        let t = MergeTriple::new(7, 73, 70, 112).unwrap();
        assert!(t.is_canonical());
        let (c, perm) = canonicalize(&t).unwrap();
        assert_eq!(c, t);
        assert_eq!(perm, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn canonicalize_disjoint_at_n8() {
        let t = MergeTriple::new(8, 7, 56, 192).unwrap();
        assert!(!t.is_canonical()); // extras {0,1,2} vs {3,4,5} do not interleave
        let (c, perm) = canonicalize(&t).unwrap();
        assert!(c.is_canonical());
        assert!(is_permutation(&perm));
        // idempotence
        let (c2, perm2) = canonicalize(&c).unwrap();
        assert_eq!(c2, c);
        assert_eq!(perm2, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn degenerate_intersecting_triples_cannot_be_built() {
        // a weight-2 pair sharing one position would leave singleton extras,
        // but such a k already violates weight(i) >= weight(k)
        match MergeTriple::new(7, 0b0000011, 0b0000101, 0b1100001) {
            Err(Error::InvalidTriple { reason }) => assert!(reason.contains("at least")),
            other => panic!("expected invalid triple, got {other:?}"),
        }
    }

    #[test]
    fn canonicalization_preserves_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let t = MergeTriple::new(8, 7, 56, 192).unwrap();
        let (c, perm) = canonicalize(&t).unwrap();
        assert!(c.is_canonical());
        let map = |x: usize| BitWord::new(x as u32, 8).apply_permutation(&perm).value() as usize;
        for m in t.members() {
            assert!(c.members().contains(&map(m)));
        }
        for _ in 0..200 {
            let extra: Vec<usize> = (0..256).filter(|_| rng.gen_bool(0.05)).collect();
            let before: Vec<usize> = t.members().into_iter().chain(extra.iter().copied()).collect();
            let after: Vec<usize> = before.iter().map(|&x| map(x)).collect();
            assert_eq!(weight_of_indices(8, &before), weight_of_indices(8, &after));
        }
    }

    #[test]
    fn ensemble_examples() {
        let t = MergeTriple::new(7, 73, 70, 112).unwrap();
        let e1 = ensemble(&t, 1).unwrap();
        assert_eq!(e1.triples().len(), 1);
        assert_eq!(e1.triples()[0].members(), [70, 73, 112]);

        let e2 = ensemble(&t, 2).unwrap();
        let shifted = e2.triples()[1].members();
        assert_eq!(shifted, [13, 19, 97]);

        assert!(matches!(
            ensemble(&t, 3),
            Err(Error::EnsembleTooLarge { m: 3, max: 2 })
        ));
    }

    #[test]
    fn enumerate_examples() {
        let found = enumerate_triples(7, 3);
        assert!(!found.is_empty());
        assert!(found.iter().any(|t| t.members() == [70, 73, 112]));
        // no admissible triple fits in 6 levels at weight 3
        assert!(enumerate_triples(6, 3).is_empty());
        // at weight 2 every triple is disjoint
        let l2 = enumerate_triples(7, 2);
        assert!(!l2.is_empty());
        assert!(l2.iter().all(|t| t.class() == TripleClass::Disjoint));
    }

    #[test]
    fn enumerate_matches_naive_scan() {
        for (n, level) in [(6, 2), (7, 3)] {
            let fast = enumerate_triples(n, level);
            let nn = 1usize << n;
            let mut naive = Vec::new();
            for i in 0..nn {
                if (i as u32).count_ones() as usize != level {
                    continue;
                }
                for j in (i + 1)..nn {
                    if (j as u32).count_ones() as usize != level {
                        continue;
                    }
                    for k in 0..nn {
                        if k == i || k == j {
                            continue;
                        }
                        if !matches!(check_triple(n, i, j, k), TripleCheck::Invalid(_)) {
                            naive.push([i, j, k]);
                        }
                    }
                }
            }
            naive.sort_unstable();
            let got: Vec<[usize; 3]> = fast.iter().map(|t| t.members()).collect();
            assert_eq!(got, naive, "n={n} level={level}");
        }
    }

    #[test]
    fn select_pairs_properties() {
        let pairs = select_pairs(7, 3, 1, &IndexSet::empty());
        assert!(!pairs.is_empty());
        let mut seen = std::collections::HashSet::new();
        for &(t, v) in &pairs {
            assert!(v > t);
            assert_eq!((t as u32).count_ones(), 4);
            assert_eq!((v as u32).count_ones(), 3);
            assert_eq!((t & v).count_ones(), 1);
            assert!(seen.insert(t));
            assert!(seen.insert(v));
        }
        // spec example: (15, 112) is admissible at overlap 0
        let disjoint = select_pairs(7, 3, 0, &IndexSet::empty());
        assert!(disjoint.iter().all(|&(t, v)| (t & v) == 0 && v > t));
        // excluding v removes every pair that used it
        let v0 = pairs[0].1;
        let without = select_pairs(7, 3, 1, &IndexSet::new([v0]));
        assert!(without.iter().all(|&(_, v)| v != v0));
    }

    #[test]
    fn theorem3_disjoint_triples_at_n6() {
        // every disjoint weight-2 triple at n = 6, all T of size <= 3 from
        // the rows of weight >= 3, plus random larger T
        let n = 6usize;
        let nn = 1usize << n;
        let high: Vec<usize> = (0..nn)
            .filter(|j| (*j as u32).count_ones() >= 3)
            .collect();
        let triples = enumerate_triples(n, 2);
        assert!(!triples.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for t in &triples {
            let m = t.members();
            let base: Vec<usize> = m.to_vec();
            assert!(weight_of_indices(n, &base) >= 8);
            for (a, &x) in high.iter().enumerate() {
                let mut v1 = base.clone();
                v1.push(x);
                assert!(weight_of_indices(n, &v1) >= 8);
                for (b, &y) in high.iter().enumerate().skip(a + 1) {
                    let mut v2 = v1.clone();
                    v2.push(y);
                    assert!(weight_of_indices(n, &v2) >= 8, "triple {m:?} T={x},{y}");
                    for &z in &high[b + 1..] {
                        let mut v3 = v2.clone();
                        v3.push(z);
                        assert!(weight_of_indices(n, &v3) >= 8, "triple {m:?} T={x},{y},{z}");
                    }
                }
            }
            for _ in 0..200 {
                let sub: Vec<usize> = high
                    .iter()
                    .copied()
                    .filter(|_| rng.gen_bool(0.5))
                    .chain(base.iter().copied())
                    .collect();
                let w = weight_xor(&RowSubset::new(n, sub));
                assert!(w >= 8);
            }
        }
    }
}
