//! Encoding and successive-cancellation (list) decoding.
//!
//! Encoding places message bits on the information positions of the
//! pre-transformed vector u', copies each dynamic frozen position from its
//! earlier source, and applies the butterfly transform wordwise. Decoding
//! works directly in the u' domain: dynamic frozen constraints are causal
//! (source before position), so an SCL decoder can force them per path the
//! same way it forces static zeros.
//!
//! The decoder uses min-sum updates with the standard penalty metric
//! (accumulate |LLR| whenever a decision contradicts the LLR sign). With a
//! full list this metric ranks complete paths exactly like soft-decision
//! maximum likelihood, and under unit all-zero observations a path's final
//! metric equals its codeword's Hamming weight; both facts are exercised in
//! the tests.

use crate::construct::CodeSpec;
use crate::rows::RowVector;
use crate::{Error, Result};

/// Decision LLRs are clamped to this magnitude to keep arithmetic finite.
pub const LLR_CLAMP: f64 = 40.0;

/// Exhaustive maximum-likelihood decoding is capped at this many info bits.
pub const ML_MAX_K: usize = 20;

/// A message of k bits, ordered by ascending information-set position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message(Vec<bool>);

impl Message {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Message of the k low bits of `value` (bit i of the value is message
    /// bit i).
    pub fn from_value(value: u64, k: usize) -> Self {
        Self((0..k).map(|b| b < 64 && (value >> b) & 1 == 1).collect())
    }

    /// The unit message with a single one at bit `index`.
    pub fn unit(index: usize, k: usize) -> Self {
        assert!(index < k, "unit index {index} outside message length {k}");
        Self((0..k).map(|b| b == index).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// The message read as an integer, bit i weighted by 2^i.
    pub fn value(&self) -> u128 {
        self.0
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &b)| acc | (u128::from(b) << i))
    }
}

/// Channel log-likelihood ratios, positive favoring bit 0. Entries are
/// clamped to `[-LLR_CLAMP, LLR_CLAMP]`; NaN is rejected.
#[derive(Clone, Debug)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(
            values.iter().all(|v| !v.is_nan()),
            "LLR values must not be NaN"
        );
        Self(
            values
                .into_iter()
                .map(|v| v.clamp(-LLR_CLAMP, LLR_CLAMP))
                .collect(),
        )
    }

    /// Noiseless observation of a codeword with the given LLR magnitude.
    pub fn from_codeword(cw: &RowVector, magnitude: f64) -> Self {
        Self::new(
            (0..cw.len())
                .map(|i| if cw.get(i) { -magnitude } else { magnitude })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// One decoded path.
#[derive(Clone, Debug)]
pub struct DecodeResult {
    pub message: Message,
    pub codeword: RowVector,
    pub path_metric: f64,
    pub list_rank: usize,
}

/// In-place butterfly transform of a packed length-2^n bit vector:
/// for every level l, positions with bit l clear absorb their partner.
pub(crate) fn butterfly(words: &mut [u64], n: usize) {
    const MASKS: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    for l in 0..n.min(6) {
        let d = 1usize << l;
        let m = MASKS[l];
        for w in words.iter_mut() {
            *w ^= (*w >> d) & m;
        }
    }
    for l in 6..n {
        let dw = 1usize << (l - 6);
        let mut b = 0;
        while b < words.len() {
            for i in 0..dw {
                words[b + i] ^= words[b + i + dw];
            }
            b += 2 * dw;
        }
    }
}

fn assemble_u(spec: &CodeSpec, msg: &Message) -> Result<RowVector> {
    if msg.len() != spec.k() {
        return Err(Error::MessageLength {
            got: msg.len(),
            expected: spec.k(),
        });
    }
    let mut u = RowVector::zero(spec.block_len());
    for (bit, pos) in msg.bits().iter().zip(spec.info_set().iter()) {
        if *bit {
            u.set(pos, true);
        }
    }
    // dynamic positions copy their (earlier, information) source
    for df in spec.dynamic_frozen() {
        if u.get(df.src) {
            u.set(df.pos, true);
        }
    }
    Ok(u)
}

/// Encodes a message: c = u' G with u' carrying the message, the dynamic
/// copies and zeros on the static frozen positions.
pub fn encode(spec: &CodeSpec, msg: &Message) -> Result<RowVector> {
    let u = assemble_u(spec, msg)?;
    let mut words = u.words().to_vec();
    butterfly(&mut words, spec.n());
    Ok(RowVector::from_words(words, spec.block_len()))
}

/// The codewords of the unit messages, i.e. the rows of the effective
/// generator in information-set order.
pub fn basis_codewords(spec: &CodeSpec) -> Result<Vec<RowVector>> {
    let k = spec.k();
    (0..k).map(|b| encode(spec, &Message::unit(b, k))).collect()
}

#[derive(Clone, Copy, Debug)]
enum PosKind {
    Info,
    Static,
    Dynamic(usize),
}

struct PathState {
    alpha: Vec<f64>,
    beta: Vec<u8>,
    u: Vec<u64>,
    metric: f64,
    birth: u64,
}

impl PathState {
    fn new(nn: usize) -> Self {
        Self {
            alpha: vec![0.0; nn.saturating_sub(1)],
            beta: vec![0; 2 * nn.saturating_sub(1)],
            u: vec![0; nn.div_ceil(64)],
            metric: 0.0,
            birth: 0,
        }
    }

    fn u_bit(&self, pos: usize) -> bool {
        (self.u[pos / 64] >> (pos % 64)) & 1 == 1
    }

    fn set_u_bit(&mut self, pos: usize, bit: bool) {
        if bit {
            self.u[pos / 64] |= 1 << (pos % 64);
        }
    }
}

#[derive(Clone, Copy)]
struct Cand {
    slot: usize,
    bit: bool,
    metric: f64,
    birth: u64,
}

/// Successive-cancellation list decoder over a fixed code description.
///
/// A decoder instance is single-threaded and reusable across frames; run
/// one instance per worker for concurrent decoding.
pub struct SclDecoder {
    n: usize,
    nn: usize,
    list_size: usize,
    kinds: Vec<PosKind>,
    info_positions: Vec<usize>,
    paths: Vec<PathState>,
    active: Vec<usize>,
    free: Vec<usize>,
    channel: Vec<f64>,
    cands: Vec<Cand>,
    kid_slots: Vec<[Option<Cand>; 2]>,
    birth_counter: u64,
}

impl SclDecoder {
    pub fn new(spec: &CodeSpec, list_size: usize) -> Result<Self> {
        assert!(list_size >= 1, "list size must be at least 1");
        spec.validate()?;
        let nn = spec.block_len();
        let mut kinds = vec![PosKind::Static; nn];
        for p in spec.info_set().iter() {
            kinds[p] = PosKind::Info;
        }
        for df in spec.dynamic_frozen() {
            kinds[df.pos] = PosKind::Dynamic(df.src);
        }
        Ok(Self {
            n: spec.n(),
            nn,
            list_size,
            kinds,
            info_positions: spec.info_set().to_vec(),
            paths: Vec::new(),
            active: Vec::new(),
            free: Vec::new(),
            channel: vec![0.0; nn],
            cands: Vec::new(),
            kid_slots: Vec::new(),
            birth_counter: 0,
        })
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    fn alpha_off(s: usize) -> usize {
        (1usize << s) - 1
    }

    fn beta_off(s: usize, slot: usize) -> usize {
        2 * ((1usize << s) - 1) + slot * (1usize << s)
    }

    /// Recomputes the decision LLR of one path for position `phi`.
    fn compute_alpha(&mut self, slot: usize, phi: usize) -> f64 {
        let n = self.n;
        let path = &mut self.paths[slot];
        let top = if phi == 0 {
            n
        } else {
            phi.trailing_zeros() as usize + 1
        };
        for s in (0..top).rev() {
            let half = 1usize << s;
            let is_g = phi != 0 && s + 1 == top;
            if s + 1 == n {
                // source is the shared channel vector
                let dst = &mut path.alpha[Self::alpha_off(s)..Self::alpha_off(s) + half];
                if is_g {
                    let b = &path.beta[Self::beta_off(s, 0)..Self::beta_off(s, 0) + half];
                    for i in 0..half {
                        dst[i] = g_llr(self.channel[i], self.channel[i + half], b[i] == 1);
                    }
                } else {
                    for i in 0..half {
                        dst[i] = f_llr(self.channel[i], self.channel[i + half]);
                    }
                }
            } else {
                let (low, high) = path.alpha.split_at_mut(Self::alpha_off(s + 1));
                let dst = &mut low[Self::alpha_off(s)..Self::alpha_off(s) + half];
                let src = &high[..2 * half];
                if is_g {
                    let b = &path.beta[Self::beta_off(s, 0)..Self::beta_off(s, 0) + half];
                    for i in 0..half {
                        dst[i] = g_llr(src[i], src[i + half], b[i] == 1);
                    }
                } else {
                    for i in 0..half {
                        dst[i] = f_llr(src[i], src[i + half]);
                    }
                }
            }
        }
        path.alpha[0]
    }

    /// Stores a decided bit and folds completed right children upward.
    fn push_beta(&mut self, slot: usize, phi: usize, bit: bool) {
        let n = self.n;
        let path = &mut self.paths[slot];
        path.set_u_bit(phi, bit);
        path.beta[Self::beta_off(0, phi & 1)] = u8::from(bit);
        let mut psi = phi;
        let mut s = 0;
        while psi & 1 == 1 && s + 1 < n {
            let half = 1usize << s;
            let boundary = Self::beta_off(s + 1, 0);
            let (low, high) = path.beta.split_at_mut(boundary);
            let left = &low[Self::beta_off(s, 0)..Self::beta_off(s, 0) + half];
            let right = &low[Self::beta_off(s, 1)..Self::beta_off(s, 1) + half];
            let dst_slot = (psi >> 1) & 1;
            let dst = &mut high[dst_slot * 2 * half..(dst_slot * 2 + 2) * half];
            for i in 0..half {
                dst[i] = left[i] ^ right[i];
                dst[half + i] = right[i];
            }
            psi >>= 1;
            s += 1;
        }
    }

    fn clone_path(&mut self, src: usize, dst: usize) {
        let (a, b) = if src < dst {
            let (l, r) = self.paths.split_at_mut(dst);
            (&l[src], &mut r[0])
        } else {
            let (l, r) = self.paths.split_at_mut(src);
            (&r[0], &mut l[dst])
        };
        b.alpha.copy_from_slice(&a.alpha);
        b.beta.copy_from_slice(&a.beta);
        b.u.copy_from_slice(&a.u);
        b.metric = a.metric;
    }

    /// Decodes one LLR vector, returning up to `list_size` candidates
    /// sorted by path metric, best first.
    pub fn decode(&mut self, llr: &LlrVector) -> Vec<DecodeResult> {
        assert_eq!(llr.len(), self.nn, "LLR length must equal block length");
        self.channel.copy_from_slice(llr.values());
        let capacity = 2 * self.list_size;
        while self.paths.len() < capacity {
            self.paths.push(PathState::new(self.nn));
        }
        self.kid_slots.resize(capacity, [None, None]);
        self.active.clear();
        self.free.clear();
        self.active.push(0);
        for slot in (1..self.paths.len()).rev() {
            self.free.push(slot);
        }
        {
            let p0 = &mut self.paths[0];
            p0.metric = 0.0;
            p0.birth = 0;
            p0.u.fill(0);
        }
        self.birth_counter = 1;

        for phi in 0..self.nn {
            match self.kinds[phi] {
                PosKind::Static => {
                    for idx in 0..self.active.len() {
                        let slot = self.active[idx];
                        let lam = self.compute_alpha(slot, phi);
                        if lam < 0.0 {
                            self.paths[slot].metric += -lam;
                        }
                        self.push_beta(slot, phi, false);
                    }
                }
                PosKind::Dynamic(src) => {
                    for idx in 0..self.active.len() {
                        let slot = self.active[idx];
                        let lam = self.compute_alpha(slot, phi);
                        let bit = self.paths[slot].u_bit(src);
                        if bit != (lam < 0.0) && lam != 0.0 {
                            self.paths[slot].metric += lam.abs();
                        }
                        self.push_beta(slot, phi, bit);
                    }
                }
                PosKind::Info => {
                    self.cands.clear();
                    for idx in 0..self.active.len() {
                        let slot = self.active[idx];
                        let lam = self.compute_alpha(slot, phi);
                        let (pen0, pen1) = if lam < 0.0 { (-lam, 0.0) } else { (0.0, lam) };
                        let m = self.paths[slot].metric;
                        let birth = self.paths[slot].birth;
                        self.cands.push(Cand {
                            slot,
                            bit: false,
                            metric: m + pen0,
                            birth,
                        });
                        self.cands.push(Cand {
                            slot,
                            bit: true,
                            metric: m + pen1,
                            birth,
                        });
                    }
                    if self.cands.len() > self.list_size {
                        self.cands.sort_unstable_by(|a, b| {
                            a.metric
                                .partial_cmp(&b.metric)
                                .expect("path metrics are finite")
                                .then(a.birth.cmp(&b.birth))
                                .then(a.bit.cmp(&b.bit))
                        });
                        self.cands.truncate(self.list_size);
                    }
                    // group surviving children per parent slot
                    let survivors = std::mem::take(&mut self.cands);
                    for c in &survivors {
                        self.kid_slots[c.slot][usize::from(c.bit)] = Some(*c);
                    }
                    let parents = std::mem::take(&mut self.active);
                    let mut new_active = Vec::with_capacity(survivors.len());
                    for &slot in &parents {
                        let kids = std::mem::take(&mut self.kid_slots[slot]);
                        match kids {
                            [None, None] => self.free.push(slot),
                            [Some(kid), None] | [None, Some(kid)] => {
                                self.paths[slot].metric = kid.metric;
                                self.push_beta(slot, phi, kid.bit);
                                new_active.push(slot);
                            }
                            [Some(kid0), Some(kid1)] => {
                                let fresh = self.free.pop().expect("pool holds 2L paths");
                                self.clone_path(slot, fresh);
                                self.paths[fresh].birth = self.birth_counter;
                                self.birth_counter += 1;
                                self.paths[slot].metric = kid0.metric;
                                self.push_beta(slot, phi, kid0.bit);
                                self.paths[fresh].metric = kid1.metric;
                                self.push_beta(fresh, phi, kid1.bit);
                                new_active.push(slot);
                                new_active.push(fresh);
                            }
                        }
                    }
                    self.active = new_active;
                    self.cands = survivors;
                }
            }
        }

        let mut order: Vec<usize> = self.active.clone();
        order.sort_by(|&a, &b| {
            self.paths[a]
                .metric
                .partial_cmp(&self.paths[b].metric)
                .expect("path metrics are finite")
                .then(self.paths[a].birth.cmp(&self.paths[b].birth))
        });
        order
            .into_iter()
            .enumerate()
            .map(|(rank, slot)| {
                let path = &self.paths[slot];
                let message = Message::new(
                    self.info_positions.iter().map(|&p| path.u_bit(p)).collect(),
                );
                let mut words = path.u.clone();
                butterfly(&mut words, self.n);
                DecodeResult {
                    message,
                    codeword: RowVector::from_words(words, self.nn),
                    path_metric: path.metric,
                    list_rank: rank,
                }
            })
            .collect()
    }
}

fn f_llr(a: f64, b: f64) -> f64 {
    let mag = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -mag
    } else {
        mag
    }
}

fn g_llr(a: f64, b: f64, bit: bool) -> f64 {
    if bit {
        b - a
    } else {
        b + a
    }
}

/// Convenience wrapper building a fresh decoder for one call.
pub fn decode_scl(spec: &CodeSpec, llr: &LlrVector, list_size: usize) -> Result<Vec<DecodeResult>> {
    let mut dec = SclDecoder::new(spec, list_size)?;
    Ok(dec.decode(llr))
}

/// Exhaustive soft-decision maximum-likelihood decoding: minimizes the sum
/// of |LLR| over disagreeing positions across all 2^k codewords. Ties go to
/// the lowest message value.
pub fn ml_oracle(spec: &CodeSpec, llr: &LlrVector) -> Result<DecodeResult> {
    let k = spec.k();
    if k > ML_MAX_K {
        return Err(Error::InfoTooLarge { k, limit: ML_MAX_K });
    }
    assert_eq!(llr.len(), spec.block_len());
    let basis = basis_codewords(spec)?;
    let metric_of = |cw: &RowVector| -> f64 {
        llr.values()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if cw.get(i) == (v < 0.0) || v == 0.0 {
                    0.0
                } else {
                    v.abs()
                }
            })
            .sum()
    };
    let mut cw = RowVector::zero(spec.block_len());
    let mut best_value = 0u64;
    let mut best_metric = metric_of(&cw);
    let mut best_cw = cw.clone();
    for i in 1..(1u64 << k) {
        cw.xor_assign(&basis[i.trailing_zeros() as usize]);
        let value = i ^ (i >> 1);
        let metric = metric_of(&cw);
        if metric < best_metric || (metric == best_metric && value < best_value) {
            best_metric = metric;
            best_value = value;
            best_cw = cw.clone();
        }
    }
    Ok(DecodeResult {
        message: Message::from_value(best_value, k),
        codeword: best_cw,
        path_metric: best_metric,
        list_rank: 0,
    })
}
