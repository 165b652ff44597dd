//! Code construction: RM-rule information sets, triple selection and the
//! assembled pre-transformed code description.
//!
//! The pipeline picks an admissible canonical triple, extends it to a shift
//! ensemble of `m` triples, searches one global bit permutation that
//! maximizes the smallest ensemble member index (weights are permutation
//! invariant, so this only avoids poorly polarized positions), merges
//! additional (t, v) pairs to thin out the minimum-weight count, and emits
//! the resulting information/frozen structure as a [`CodeSpec`].

use serde::{Deserialize, Serialize};

use crate::bits::{is_permutation, BitWord, IndexSet};
use crate::merge::{self, MergeTriple, TripleEnsemble};
use crate::weight::{self, WeightReport};
use crate::{Error, Result};

/// One dynamic frozen position: `u'[pos]` copies `u'[src]` with `src < pos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicFrozen {
    pub pos: usize,
    pub src: usize,
}

/// Construction metadata carried alongside a built code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildMeta {
    pub r: usize,
    pub m: usize,
    pub overlap: usize,
    pub triples: Vec<[usize; 3]>,
    pub pairs: Vec<[usize; 2]>,
    pub permutation: Vec<usize>,
}

/// Full description of a constructed code: block size, information set,
/// static/dynamic frozen structure and the declared design distance.
///
/// The sparse pre-transformation is implied by `dynamic_frozen`: every
/// entry (pos, src) marks a one at row `src`, column `pos` of the unit
/// upper-triangular pre-transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    n: usize,
    info_set: IndexSet,
    static_frozen: IndexSet,
    dynamic_frozen: Vec<DynamicFrozen>,
    design_d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<BuildMeta>,
}

impl CodeSpec {
    /// A pure polar-like code: the given information set, everything else
    /// statically frozen, no pre-transform. The design distance follows the
    /// closed form `2^{min i1(b_i)}`.
    pub fn polar_like(n: usize, info_set: IndexSet) -> Result<Self> {
        if info_set.is_empty() {
            return Err(Error::BadSpec("information set is empty".into()));
        }
        let design_d = weight::polar_like_min_distance(n, &info_set);
        let spec = Self::assemble(n, info_set, Vec::new(), design_d, None)?;
        Ok(spec)
    }

    /// Builds a spec from its parts, deriving the static frozen set as the
    /// complement, and validates the partition.
    pub fn assemble(
        n: usize,
        info_set: IndexSet,
        mut dynamic_frozen: Vec<DynamicFrozen>,
        design_d: usize,
        meta: Option<BuildMeta>,
    ) -> Result<Self> {
        let nn = 1usize
            .checked_shl(n as u32)
            .filter(|_| n >= 1 && n <= 30)
            .ok_or_else(|| Error::BadSpec(format!("unsupported n = {n}")))?;
        dynamic_frozen.sort_by_key(|df| df.pos);
        let taken: IndexSet = info_set
            .iter()
            .chain(dynamic_frozen.iter().map(|df| df.pos))
            .collect();
        let static_frozen = IndexSet::new((0..nn).filter(|p| !taken.contains(*p)));
        let spec = Self {
            n,
            info_set,
            static_frozen,
            dynamic_frozen,
            design_d,
            meta,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the structural invariants: the three position classes
    /// partition `[0, N)`, every dynamic position has exactly one source,
    /// sources precede their positions and carry information.
    pub fn validate(&self) -> Result<()> {
        let nn = self.block_len();
        if self.n < 1 || self.n > 30 {
            return Err(Error::BadSpec(format!("unsupported n = {}", self.n)));
        }
        let count =
            self.info_set.len() + self.static_frozen.len() + self.dynamic_frozen.len();
        if count != nn {
            return Err(Error::BadSpec(format!(
                "position classes cover {count} of {nn} positions"
            )));
        }
        let mut seen = vec![false; nn];
        for p in self
            .info_set
            .iter()
            .chain(self.static_frozen.iter())
            .chain(self.dynamic_frozen.iter().map(|df| df.pos))
        {
            if p >= nn {
                return Err(Error::BadSpec(format!("position {p} out of range")));
            }
            if seen[p] {
                return Err(Error::BadSpec(format!("position {p} assigned twice")));
            }
            seen[p] = true;
        }
        for df in &self.dynamic_frozen {
            if df.src >= df.pos {
                return Err(Error::BadSpec(format!(
                    "dynamic frozen {} must copy an earlier position, source is {}",
                    df.pos, df.src
                )));
            }
            if !self.info_set.contains(df.src) {
                return Err(Error::BadSpec(format!(
                    "dynamic frozen {} copies non-information position {}",
                    df.pos, df.src
                )));
            }
        }
        if self.design_d == 0 {
            return Err(Error::BadSpec("design distance must be positive".into()));
        }
        if let Some(meta) = &self.meta {
            if !meta.permutation.is_empty() && !is_permutation(&meta.permutation) {
                return Err(Error::BadSpec("meta permutation is not a bijection".into()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Block length `N = 2^n`.
    pub fn block_len(&self) -> usize {
        1usize << self.n
    }

    /// Information length `k`.
    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.block_len() as f64
    }

    pub fn info_set(&self) -> &IndexSet {
        &self.info_set
    }

    pub fn static_frozen(&self) -> &IndexSet {
        &self.static_frozen
    }

    pub fn dynamic_frozen(&self) -> &[DynamicFrozen] {
        &self.dynamic_frozen
    }

    pub fn design_d(&self) -> usize {
        self.design_d
    }

    pub fn meta(&self) -> Option<&BuildMeta> {
        self.meta.as_ref()
    }

    /// Sparse pre-transform entries (row, column) above the diagonal.
    pub fn pretransform_entries(&self) -> Vec<(usize, usize)> {
        self.dynamic_frozen.iter().map(|df| (df.src, df.pos)).collect()
    }
}

/// The RM-rule information set: all rows whose binary representation has at
/// least `n - r` ones.
pub fn rm_info_set(n: usize, r: usize) -> IndexSet {
    assert!(r <= n, "order r = {r} exceeds n = {n}");
    let nn = 1usize << n;
    IndexSet::new((0..nn).filter(|j| (*j as u32).count_ones() as usize >= n - r))
}

/// Report of one construction run.
#[derive(Clone, Debug, Serialize)]
pub struct BuildReport {
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub overlap: usize,
    pub k: usize,
    pub design_d: usize,
    pub base: Option<MergeTriple>,
    pub ensemble: Option<TripleEnsemble>,
    pub triples: Vec<[usize; 3]>,
    pub pairs: Vec<[usize; 2]>,
    pub permutation: Vec<usize>,
}

impl BuildReport {
    /// The (m, k, d) tuple in the shape of the construction table.
    pub fn tuple(&self) -> (usize, usize, usize) {
        (self.m, self.k, self.design_d)
    }
}

/// Candidate evaluation for one canonical base: the ensemble, the best
/// permutation and its score.
struct Candidate {
    ensemble: TripleEnsemble,
    permutation: Vec<usize>,
    score: usize,
    flattened: Vec<usize>,
}

fn best_permutation(n: usize, ensemble: &TripleEnsemble) -> Result<(Vec<usize>, usize, Vec<usize>)> {
    if n > 8 {
        return Err(Error::Unsupported(format!(
            "permutation search is exhaustive over n! and capped at n = 8, got n = {n}"
        )));
    }
    let members = ensemble.members();
    let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    for perm in all_permutations(n) {
        let mapped: Vec<usize> = members
            .iter()
            .map(|&x| BitWord::new(x as u32, n).apply_permutation(&perm).value() as usize)
            .collect();
        let score = *mapped.iter().min().expect("ensemble is non-empty");
        // normalize the flattened key: i < j within each triple
        let mut flat = Vec::with_capacity(mapped.len());
        for t in mapped.chunks_exact(3) {
            let (a, b) = (t[0].min(t[1]), t[0].max(t[1]));
            flat.extend([a, b, t[2]]);
        }
        let better = match &best {
            None => true,
            Some((bs, bf, bp)) => score > *bs || (score == *bs && (&flat, &perm) < (bf, bp)),
        };
        if better {
            best = Some((score, flat, perm));
        }
    }
    let (score, flat, perm) = best.expect("at least one permutation exists");
    Ok((perm, score, flat))
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(pivot) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let swap = (pivot + 1..n).rev().find(|&i| cur[i] > cur[pivot]).unwrap();
        cur.swap(pivot, swap);
        cur[pivot + 1..].reverse();
    }
    out
}

/// Runs the full construction for RM(n, r) plus `m` merged triples and the
/// greedy pair merge at the given support `overlap`.
///
/// `pair_budget` caps how many (t, v) pairs are merged; `None` takes all.
pub fn build(
    n: usize,
    r: usize,
    m: usize,
    overlap: usize,
    pair_budget: Option<usize>,
) -> Result<(CodeSpec, BuildReport)> {
    if r > n {
        return Err(Error::BadSpec(format!("order r = {r} exceeds n = {n}")));
    }
    if overlap > 1 {
        return Err(Error::BadSpec("pair overlap must be 0 or 1".into()));
    }
    let rm = rm_info_set(n, r);
    let design_d = 1usize << (n - r);
    if n <= r {
        return Err(Error::BadSpec(format!("need r < n, got n = {n}, r = {r}")));
    }
    let level = n - r - 1;

    let mut info = rm.clone();
    let mut dynamic: Vec<DynamicFrozen> = Vec::new();
    let mut chosen: Option<Candidate> = None;

    if m >= 1 {
        if level < 2 {
            return Err(Error::NoAdmissibleTriple { n, level });
        }
        let mut canonical: Vec<MergeTriple> = Vec::new();
        for t in merge::enumerate_triples(n, level) {
            if let Ok((c, _)) = merge::canonicalize(&t) {
                if !canonical.contains(&c) {
                    canonical.push(c);
                }
            }
        }
        if canonical.is_empty() {
            return Err(Error::NoAdmissibleTriple { n, level });
        }
        canonical.sort_by_key(|t| t.members());
        let budget = canonical.iter().map(|t| t.kappa() + 1).max().unwrap();
        if m > budget {
            return Err(Error::EnsembleTooLarge { m, max: budget });
        }
        for base in &canonical {
            if m > base.kappa() + 1 {
                continue;
            }
            let ens = merge::ensemble(base, m)?;
            let (perm, score, flattened) = best_permutation(n, &ens)?;
            let cand = Candidate {
                ensemble: ens.permuted(&perm),
                permutation: perm,
                score,
                flattened,
            };
            let better = match &chosen {
                None => true,
                Some(cur) => {
                    cand.score > cur.score
                        || (cand.score == cur.score && cand.flattened < cur.flattened)
                }
            };
            if better {
                chosen = Some(cand);
            }
        }
        let cand = chosen.as_ref().expect("a canonical triple was selected");
        for t in cand.ensemble.triples() {
            let members = t.members();
            let a = *members.iter().min().unwrap();
            info = info.union(&IndexSet::new([a]));
            for &other in members.iter().filter(|&&x| x != a) {
                dynamic.push(DynamicFrozen { pos: other, src: a });
            }
        }
    }

    // pair merging: t in the lowest information layer, v one layer below
    let excluded: IndexSet = chosen
        .as_ref()
        .map(|c| c.ensemble.members().into_iter().collect())
        .unwrap_or_default();
    let mut pairs = merge::select_pairs(n, level, overlap, &excluded);
    if let Some(budget) = pair_budget {
        pairs.truncate(budget);
    }
    for &(t, v) in &pairs {
        dynamic.push(DynamicFrozen { pos: v, src: t });
    }

    let (triples, permutation, base, ens) = match chosen {
        Some(c) => (
            c.ensemble.triples().iter().map(|t| t.members()).collect(),
            c.permutation.clone(),
            Some(c.ensemble.base().clone()),
            Some(c.ensemble),
        ),
        None => (Vec::new(), (0..n).collect(), None, None),
    };
    let meta = BuildMeta {
        r,
        m,
        overlap,
        triples,
        pairs: pairs.iter().map(|&(t, v)| [t, v]).collect(),
        permutation: permutation.clone(),
    };
    let spec = CodeSpec::assemble(n, info, dynamic, design_d, Some(meta.clone()))?;
    let report = BuildReport {
        n,
        r,
        m,
        overlap,
        k: spec.k(),
        design_d,
        base,
        ensemble: ens,
        triples: meta.triples,
        pairs: meta.pairs,
        permutation,
    };
    Ok((spec, report))
}

/// How hard `validate` should look for low-weight codewords.
#[derive(Clone, Copy, Debug)]
pub enum ValidateEffort {
    /// Full spectrum, only for k <= 26.
    Exhaustive,
    /// Random-message sample of the given size; refutes the design distance
    /// when it finds anything lighter.
    Sampled(u64),
    /// List search with the given list size.
    ListSearch(usize),
}

/// Checks the declared design distance of a spec.
pub fn validate(spec: &CodeSpec, effort: ValidateEffort) -> Result<WeightReport> {
    match effort {
        ValidateEffort::Exhaustive => weight::spectrum_exhaustive(spec),
        ValidateEffort::Sampled(count) => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5a3dc0de);
            let basis = crate::codec::basis_codewords(spec)?;
            let mut report = WeightReport::new(false);
            for _ in 0..count {
                let mut cw = crate::rows::RowVector::zero(spec.block_len());
                let mut any = false;
                for b in &basis {
                    if rng.gen::<bool>() {
                        cw.xor_assign(b);
                        any = true;
                    }
                }
                if any && !cw.is_zero() {
                    report.record(cw.weight(), 1);
                }
            }
            Ok(report)
        }
        ValidateEffort::ListSearch(list_size) => {
            weight::min_weight_list_search(spec, list_size, 10)
        }
    }
}
