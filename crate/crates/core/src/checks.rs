//! Verification suites: executable forms of the weight identities, the
//! triple-merging theorems and the decoder contracts.
//!
//! Each check returns an outcome instead of panicking so the CLI can print
//! machine-readable pass/fail lines with counterexamples; the acceptance
//! tests assert on the outcomes. Sweep sizes here are the pinned ones.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{BitWord, IndexSet};
use crate::codec::{self, LlrVector, Message, SclDecoder};
use crate::construct::{build, CodeSpec};
use crate::merge::{self, TripleClass};
use crate::weight::{self, gaussian, RowSubset};

/// Result of one named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(suite: &'static str, name: &'static str, pass: bool, detail: String) -> Self {
        Self {
            suite,
            name,
            pass,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}/{}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.detail
        )
    }
}

/// Row `j` of the size-`2^n` matrix packed into a u128 (n <= 7): the
/// support is the set of submasks of `j`.
fn row_u128(n: usize, j: usize) -> u128 {
    debug_assert!(n <= 7 && j < (1 << n));
    let mut v: u128 = 1; // submask 0
    let mut s = j;
    while s != 0 {
        v |= 1u128 << s;
        s = (s - 1) & j;
    }
    v
}

fn layer(n: usize, weight: usize) -> Vec<usize> {
    (0..(1usize << n))
        .filter(|j| (*j as u32).count_ones() as usize == weight)
        .collect()
}

fn layers_at_least(n: usize, weight: usize) -> Vec<usize> {
    (0..(1usize << n))
        .filter(|j| (*j as u32).count_ones() as usize >= weight)
        .collect()
}

/// Oracle equivalence, the partition bound, permutation invariance and the
/// closed-form polar-like distance.
pub fn suite_weights(n_lo: usize, n_hi: usize) -> Vec<CheckOutcome> {
    const SUITE: &str = "weights";
    let mut out = Vec::new();

    // closed form against the XOR oracle, exhaustive up to |T| = 4
    {
        let mut checked = 0u64;
        let mut failure = None;
        let mut probe = |n: usize, rows: &[usize]| -> bool {
            let subset = RowSubset::new(n, rows.iter().copied());
            let lhs = weight::weight_formula(&subset).unwrap();
            let rhs = weight::weight_xor(&subset);
            checked += 1;
            if lhs != rhs {
                failure = Some(format!("n={n} T={rows:?}: {lhs} != {rhs}"));
                return false;
            }
            true
        };
        'outer: for n in n_lo.max(2)..=n_hi.min(5) {
            let nn = 1usize << n;
            for a in 0..nn {
                if !probe(n, &[a]) {
                    break 'outer;
                }
                for b in a + 1..nn {
                    if !probe(n, &[a, b]) {
                        break 'outer;
                    }
                    for c in b + 1..nn {
                        if !probe(n, &[a, b, c]) {
                            break 'outer;
                        }
                        for d in c + 1..nn {
                            if !probe(n, &[a, b, c, d]) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "formula-xor-exhaustive",
            failure.is_none(),
            failure.unwrap_or(format!("{checked} subsets up to size 4, all equal")),
        ));
    }

    // closed form against the XOR oracle, random subsets up to size 10
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0001);
        let mut failure = None;
        let mut checked = 0u64;
        for n in [6usize, 7] {
            if n < n_lo || n > n_hi {
                continue;
            }
            let nn = 1usize << n;
            for _ in 0..10_000 {
                let size = rng.gen_range(1..=10usize);
                let rows: Vec<usize> = (0..size).map(|_| rng.gen_range(0..nn)).collect();
                let subset = RowSubset::new(n, rows.iter().copied());
                if subset.rows().is_empty() {
                    continue;
                }
                let lhs = weight::weight_formula(&subset).unwrap();
                let rhs = weight::weight_xor(&subset);
                checked += 1;
                if lhs != rhs {
                    failure = Some(format!("n={n} T={rows:?}: {lhs} != {rhs}"));
                    break;
                }
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "formula-xor-random",
            failure.is_none(),
            failure.unwrap_or(format!("{checked} random subsets up to size 10, all equal")),
        ));
    }

    // partition lower bound over every subset at n = 4
    {
        let n = 4usize;
        let mut failure = None;
        for mask in 1u32..(1 << 16) {
            let rows: Vec<usize> = (0..16).filter(|b| (mask >> b) & 1 == 1).collect();
            let subset = RowSubset::new(n, rows.iter().copied());
            let bound = weight::weight_lower_bound(&subset);
            let actual = weight::weight_xor(&subset);
            if bound > actual {
                failure = Some(format!("T={rows:?}: bound {bound} > weight {actual}"));
                break;
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "partition-bound-exhaustive",
            failure.is_none(),
            failure.unwrap_or_else(|| "all 65535 nonempty subsets at n=4".into()),
        ));
    }

    // permutation invariance of the sum weight
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0002);
        let mut failure = None;
        'outer: for n in 2..=7usize {
            let nn = 1usize << n;
            for _ in 0..1000 {
                let size = rng.gen_range(1..=6usize);
                let rows: Vec<usize> = (0..size).map(|_| rng.gen_range(0..nn)).collect();
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let mapped: Vec<usize> = rows
                    .iter()
                    .map(|&j| BitWord::new(j as u32, n).apply_permutation(&perm).value() as usize)
                    .collect();
                let a = weight::weight_xor(&RowSubset::new(n, rows.iter().copied()));
                let b = weight::weight_xor(&RowSubset::new(n, mapped.iter().copied()));
                if a != b {
                    failure = Some(format!("n={n} T={rows:?} perm={perm:?}: {a} != {b}"));
                    break 'outer;
                }
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "permutation-invariance",
            failure.is_none(),
            failure.unwrap_or_else(|| "1000 random (T, perm) pairs per n in 2..=7".into()),
        ));
    }

    // exhaustive spectra agree with the closed-form minimum distance
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0003);
        let mut failure = None;
        for trial in 0..20 {
            let n = rng.gen_range(2..=5usize);
            let nn = 1usize << n;
            let k = rng.gen_range(1..=nn.min(16));
            let mut all: Vec<usize> = (0..nn).collect();
            all.shuffle(&mut rng);
            let info = IndexSet::new(all[..k].iter().copied());
            let spec = CodeSpec::polar_like(n, info.clone()).unwrap();
            let spectrum = weight::spectrum_exhaustive(&spec).unwrap();
            let expect = weight::polar_like_min_distance(n, &info);
            if spectrum.min_weight() != expect {
                failure = Some(format!(
                    "trial {trial}: n={n} info={info:?}: spectrum {} vs closed form {expect}",
                    spectrum.min_weight()
                ));
                break;
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "rm-rule-distance",
            failure.is_none(),
            failure.unwrap_or_else(|| "20 random polar-like specs, k <= 16, n <= 5".into()),
        ));
    }

    out
}

/// Theorems 3-5: disjoint triples, intersecting triples and the shift
/// ensemble, swept exhaustively over small companion sets plus random tails.
pub fn suite_theorems() -> Vec<CheckOutcome> {
    const SUITE: &str = "theorems";
    let mut out = Vec::new();

    // disjoint triples at n = 6, companion rows of weight >= 3
    {
        let n = 6usize;
        let bound = 8u32; // 2^{l+1}, l = 2
        let high: Vec<u128> = layers_at_least(n, 3).iter().map(|&j| row_u128(n, j)).collect();
        let triples = merge::enumerate_triples(n, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0010);
        let mut failure = None;
        let mut checked = 0u64;
        'outer: for t in &triples {
            let m = t.members();
            let base =
                row_u128(n, m[0]) ^ row_u128(n, m[1]) ^ row_u128(n, m[2]);
            if let Some(f) = sweep_small_and_random(
                base, &high, bound, 100_000 / triples.len(), &mut rng, &mut checked,
            ) {
                failure = Some(format!("triple {m:?}: {f}"));
                break 'outer;
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "disjoint-triples-n6",
            failure.is_none(),
            failure.unwrap_or(format!(
                "{} triples, {checked} companion sets, all weights >= {bound}",
                triples.len()
            )),
        ));
    }

    // intersecting triples at n = 7, companion rows of weight >= 4
    {
        let n = 7usize;
        let bound = 16u32;
        let high: Vec<u128> = layers_at_least(n, 4).iter().map(|&j| row_u128(n, j)).collect();
        let triples: Vec<_> = merge::enumerate_triples(n, 3)
            .into_iter()
            .filter(|t| t.class() == TripleClass::Intersecting)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0011);
        let mut failure = None;
        let mut checked = 0u64;
        'outer: for t in &triples {
            let m = t.members();
            let base = row_u128(n, m[0]) ^ row_u128(n, m[1]) ^ row_u128(n, m[2]);
            if let Some(f) = sweep_small_and_random(
                base, &high, bound, 100_000 / triples.len().max(1), &mut rng, &mut checked,
            ) {
                failure = Some(format!("triple {m:?}: {f}"));
                break 'outer;
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "intersecting-triples-n7",
            failure.is_none(),
            failure.unwrap_or(format!(
                "{} triples, {checked} companion sets, all weights >= {bound}",
                triples.len()
            )),
        ));
    }

    // the canonical ensemble at n = 7: every subset of the two shifted
    // triples, exhaustive companions up to size 3 plus a large random tail
    {
        let n = 7usize;
        let bound = 16u32;
        let ensemble = canonical_ensemble_n7();
        let bases: Vec<u128> = (0..4u32)
            .map(|d_mask| {
                let mut acc = 0u128;
                for (d, t) in ensemble.triples().iter().enumerate() {
                    if (d_mask >> d) & 1 == 1 {
                        for x in t.members() {
                            acc ^= row_u128(n, x);
                        }
                    }
                }
                acc
            })
            .collect();
        let high: Vec<u128> = layers_at_least(n, 4).iter().map(|&j| row_u128(n, j)).collect();
        let mut failure = None;
        let mut checked = 0u64;
        'outer: for (d_mask, &base) in bases.iter().enumerate() {
            // companions of size 0..=3; skip the all-empty combination
            if d_mask != 0 && base.count_ones() < bound {
                failure = Some(format!("D mask {d_mask:b}: bare weight {}", base.count_ones()));
                break;
            }
            for (a, &x) in high.iter().enumerate() {
                let w1 = base ^ x;
                checked += 1;
                if w1.count_ones() < bound {
                    failure = Some(format!("D mask {d_mask:b}, |T|=1 at {a}"));
                    break 'outer;
                }
                for (b, &y) in high.iter().enumerate().skip(a + 1) {
                    let w2 = w1 ^ y;
                    checked += 1;
                    if w2.count_ones() < bound {
                        failure = Some(format!("D mask {d_mask:b}, |T|=2 at ({a},{b})"));
                        break 'outer;
                    }
                    for &z in &high[b + 1..] {
                        checked += 1;
                        if (w2 ^ z).count_ones() < bound {
                            failure = Some(format!("D mask {d_mask:b}, |T|=3"));
                            break 'outer;
                        }
                    }
                }
            }
        }
        if failure.is_none() {
            let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0012);
            'outer2: for _ in 0..1_000_000u32 {
                let mut t_acc = 0u128;
                let mut any = false;
                for &r in &high {
                    if rng.gen::<bool>() {
                        t_acc ^= r;
                        any = true;
                    }
                }
                for (d_mask, &base) in bases.iter().enumerate() {
                    if d_mask == 0 && !any {
                        continue;
                    }
                    checked += 1;
                    if (base ^ t_acc).count_ones() < bound {
                        failure = Some(format!("random T violates D mask {d_mask:b}"));
                        break 'outer2;
                    }
                }
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "shift-ensemble-n7",
            failure.is_none(),
            failure.unwrap_or(format!(
                "ensemble {:?}, {checked} combinations, all weights >= {bound}",
                ensemble
                    .triples()
                    .iter()
                    .map(|t| t.members())
                    .collect::<Vec<_>>()
            )),
        ));
    }

    out
}

/// The canonical intersecting triple at n = 7 and its full shift ensemble.
pub fn canonical_ensemble_n7() -> merge::TripleEnsemble {
    let mut canonical: Vec<merge::MergeTriple> = Vec::new();
    for t in merge::enumerate_triples(7, 3) {
        if let Ok((c, _)) = merge::canonicalize(&t) {
            if !canonical.contains(&c) {
                canonical.push(c);
            }
        }
    }
    canonical.sort_by_key(|t| t.members());
    let base = canonical.first().expect("n=7 admits canonical triples");
    merge::ensemble(base, base.kappa() + 1).expect("budget matches kappa")
}

/// Sweeps companion subsets of size 0..=3 exhaustively plus `random` random
/// subsets; returns the first violation.
fn sweep_small_and_random(
    base: u128,
    high: &[u128],
    bound: u32,
    random: usize,
    rng: &mut ChaCha8Rng,
    checked: &mut u64,
) -> Option<String> {
    if base.count_ones() < bound {
        return Some(format!("bare weight {}", base.count_ones()));
    }
    for (a, &x) in high.iter().enumerate() {
        let w1 = base ^ x;
        *checked += 1;
        if w1.count_ones() < bound {
            return Some(format!("|T|=1 at index {a}"));
        }
        for (b, &y) in high.iter().enumerate().skip(a + 1) {
            let w2 = w1 ^ y;
            *checked += 1;
            if w2.count_ones() < bound {
                return Some(format!("|T|=2 at ({a},{b})"));
            }
            for (c, &z) in high.iter().enumerate().skip(b + 1) {
                *checked += 1;
                if (w2 ^ z).count_ones() < bound {
                    return Some(format!("|T|=3 at ({a},{b},{c})"));
                }
            }
        }
    }
    for _ in 0..random {
        let mut acc = base;
        for &r in high {
            if rng.gen::<bool>() {
                acc ^= r;
            }
        }
        *checked += 1;
        if acc.count_ones() < bound {
            return Some("random companion set".into());
        }
    }
    None
}

/// Appendix pair bounds at n = 5, swept over every companion subset.
pub fn suite_appendix(n: usize) -> Vec<CheckOutcome> {
    const SUITE: &str = "appendix";
    assert!(n == 4 || n == 5, "pair sweep is sized for n = 5");
    let mut out = Vec::new();
    let level = 2usize;
    let rows: Vec<u32> = (0..(1usize << n))
        .map(|j| row_u128(n, j) as u32)
        .collect();
    let pairs: Vec<(usize, usize)> = {
        let l = layer(n, level);
        let mut v = Vec::new();
        for (a, &i) in l.iter().enumerate() {
            for &j in &l[a + 1..] {
                v.push((i, j));
            }
        }
        v
    };
    let high: Vec<u32> = layers_at_least(n, level + 1)
        .iter()
        .map(|&j| rows[j])
        .collect();
    let total_masks = 1u64 << high.len();

    // disjoint pairs: weight >= 2^{l+1} - 2
    {
        let bound = (1u32 << (level + 1)) - 2;
        let mut failure = None;
        let mut swept = 0u64;
        'outer: for &(i, j) in pairs.iter().filter(|&&(i, j)| i & j == 0) {
            let base = rows[i] ^ rows[j];
            let mut acc = base;
            if acc.count_ones() < bound {
                failure = Some(format!("pair ({i},{j}) bare"));
                break;
            }
            for s in 1..total_masks {
                acc ^= high[s.trailing_zeros() as usize];
                swept += 1;
                if acc.count_ones() < bound {
                    failure = Some(format!("pair ({i},{j}), companion mask {s:#x}"));
                    break 'outer;
                }
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "pair-bound-disjoint",
            failure.is_none(),
            failure.unwrap_or(format!(
                "{swept} combinations over disjoint pairs, all weights >= {bound}"
            )),
        ));
    }

    // all pairs: weight >= 2^{l+1} - 2^{w+1}
    {
        let mut failure = None;
        let mut swept = 0u64;
        'outer: for &(i, j) in &pairs {
            let w = (i & j).count_ones();
            let bound = (1u32 << (level + 1)).saturating_sub(1 << (w + 1));
            let base = rows[i] ^ rows[j];
            let mut acc = base;
            if acc.count_ones() < bound {
                failure = Some(format!("pair ({i},{j}) bare"));
                break;
            }
            for s in 1..total_masks {
                acc ^= high[s.trailing_zeros() as usize];
                swept += 1;
                if acc.count_ones() < bound {
                    failure = Some(format!("pair ({i},{j}), companion mask {s:#x}"));
                    break 'outer;
                }
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "pair-bound-general",
            failure.is_none(),
            failure.unwrap_or(format!("{swept} combinations over all pairs")),
        ));
    }

    out
}

/// Decoder contracts: ML agreement on a toy code, noiseless roundtrips and
/// dynamic-frozen consistency on the constructed codes.
pub fn suite_codec() -> Vec<CheckOutcome> {
    const SUITE: &str = "codec";
    let mut out = Vec::new();

    // full-list SCL equals the exhaustive ML oracle on noisy frames
    {
        let spec = build(4, 1, 0, 1, None).unwrap().0;
        let k = spec.k();
        let mut decoder = SclDecoder::new(&spec, 1 << k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0020);
        let sigma2 = 1.0 / (2.0 * spec.rate() * 10f64.powf(0.2)); // 2 dB
        let mut failure = None;
        for frame in 0..100 {
            let msg = Message::new((0..k).map(|_| rng.gen()).collect());
            let cw = codec::encode(&spec, &msg).unwrap();
            let llr = LlrVector::new(
                (0..spec.block_len())
                    .map(|i| {
                        let x = if cw.get(i) { -1.0 } else { 1.0 };
                        2.0 * (x + sigma2.sqrt() * gaussian(&mut rng)) / sigma2
                    })
                    .collect(),
            );
            let scl = decoder.decode(&llr);
            let ml = codec::ml_oracle(&spec, &llr).unwrap();
            if scl[0].codeword != ml.codeword {
                failure = Some(format!("frame {frame}: list and oracle disagree"));
                break;
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "ml-agreement",
            failure.is_none(),
            failure.unwrap_or_else(|| "100 noisy frames at 2 dB, (16,5) code, L=32".into()),
        ));
    }

    // noiseless roundtrip on every constructed spec
    {
        let specs = [
            ("(16,5)", build(4, 1, 0, 1, None).unwrap().0),
            ("(128,66)", build(7, 3, 2, 1, None).unwrap().0),
            ("(128,100)", build(7, 4, 1, 0, None).unwrap().0),
        ];
        let mut failure = None;
        'outer: for (name, spec) in &specs {
            let k = spec.k();
            let mut decoder = SclDecoder::new(spec, 8).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0021);
            for trial in 0..1000 {
                let msg = Message::new((0..k).map(|_| rng.gen()).collect());
                let cw = codec::encode(spec, &msg).unwrap();
                let res = decoder.decode(&LlrVector::from_codeword(&cw, 8.0));
                if res[0].message != msg || res[0].codeword != cw {
                    failure = Some(format!("{name} trial {trial}: roundtrip failed"));
                    break 'outer;
                }
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "noiseless-roundtrip",
            failure.is_none(),
            failure.unwrap_or_else(|| "1000 messages per constructed spec".into()),
        ));
    }

    // every returned path satisfies the dynamic frozen constraints
    {
        let spec = build(7, 3, 2, 1, None).unwrap().0;
        let mut decoder = SclDecoder::new(&spec, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0022);
        let mut failure = None;
        'outer: for frame in 0..50 {
            let llr = LlrVector::new(
                (0..spec.block_len())
                    .map(|_| rng.gen_range(-2.0..2.0))
                    .collect(),
            );
            for res in decoder.decode(&llr) {
                let again = codec::encode(&spec, &res.message).unwrap();
                if res.codeword != again {
                    failure = Some(format!("frame {frame}: path violates a copy constraint"));
                    break 'outer;
                }
            }
        }
        out.push(CheckOutcome::new(
            SUITE,
            "dynamic-frozen-paths",
            failure.is_none(),
            failure.unwrap_or_else(|| "every path re-encodes to its own codeword".into()),
        ));
    }

    out
}
