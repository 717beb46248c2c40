//! Word problem for `𝒢_ω`: local reduction, the contraction recursion for
//! identity testing, level signatures and an exact canonical element key.
//!
//! Section words are read off the generator recursion stored in
//! [`GroupFamily`]: for a product `w₁ · … · wₙ` (last letter acts first) the
//! section at `x` is `w₁|_{x₁} · … · wₙ|_{xₙ}` where `xₙ = x` and each
//! `x_{j-1} = w_j(x_j)`. Only `a` moves first-level vertices.

use crate::groups::{Gen, GroupContext, GroupFamily};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::hash::{BuildHasher, Hash};
use std::ops::Deref;

/// A word in local normal form: no letter repeats, no two spine letters are
/// adjacent, no degenerate letters. Such words alternate `a` with spine letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedWord(Vec<Gen>);

impl ReducedWord {
    pub fn into_vec(self) -> Vec<Gen> {
        self.0
    }
}

impl Deref for ReducedWord {
    type Target = [Gen];
    fn deref(&self) -> &[Gen] {
        &self.0
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::groups::word_string(&self.0))
    }
}

/// Appends `word` to the reduced word `out`, keeping it reduced.
pub(crate) fn push_reduced(family: &GroupFamily, stage: usize, out: &mut Vec<Gen>, word: &[Gen]) {
    for &g in word {
        let Some(g) = family.canonical_letter(stage, g) else {
            continue;
        };
        match out.last() {
            Some(&t) if t == g => {
                out.pop();
            }
            Some(&t) if t.is_spine() && g.is_spine() => {
                out.pop();
                // The product lands next to an `a` (or at the start), so it
                // cannot cancel further.
                out.push(t.klein_product(g));
            }
            _ => out.push(g),
        }
    }
}

pub fn reduce(ctx: &GroupContext, word: &[Gen]) -> ReducedWord {
    let mut out = Vec::with_capacity(word.len());
    push_reduced(ctx.family(), ctx.stage(), &mut out, word);
    ReducedWord(out)
}

/// Section words of a reduced word at vertices 0 and 1, reduced over the next stage.
pub(crate) fn split(family: &GroupFamily, stage: usize, word: &[Gen]) -> [Vec<Gen>; 2] {
    let next = family.next_stage(stage);
    let mut raw = [
        Vec::with_capacity(word.len() / 2 + 1),
        Vec::with_capacity(word.len() / 2 + 1),
    ];
    // cur[x] = vertex reached by x under the letters to the right.
    let mut cur = [0u8, 1u8];
    for &g in word.iter().rev() {
        if g == Gen::A {
            cur = [cur[0] ^ 1, cur[1] ^ 1];
            continue;
        }
        for x in 0..2 {
            let letter = if cur[x] == 0 {
                family.zero_section(stage, g)
            } else {
                Some(g)
            };
            if let Some(l) = letter {
                raw[x].push(l);
            }
        }
    }
    raw.map(|mut r| {
        r.reverse();
        let mut out = Vec::with_capacity(r.len());
        push_reduced(family, next, &mut out, &r);
        out
    })
}

/// First-level sections of `word` as reduced words over the next stage.
pub fn sections(ctx: &GroupContext, word: &[Gen]) -> [ReducedWord; 2] {
    let w = reduce(ctx, word);
    split(ctx.family(), ctx.stage(), &w).map(ReducedWord)
}

/// Root permutation parity of a word (`true` = swaps the first level).
pub fn swaps_first_level(word: &[Gen]) -> bool {
    word.iter().filter(|&&g| g == Gen::A).count() % 2 == 1
}

const MEMO_MIN_LEN: usize = 12;
const MEMO_SHARDS: usize = 16;

/// Bounded memo for identity tests keyed by (stage, reduced word). Two
/// generations per shard: when the young generation fills up the old one is
/// dropped, which approximates least-recently-used eviction.
#[derive(Debug)]
pub(crate) struct IdentityMemo {
    shards: Vec<Mutex<MemoShard>>,
    shard_cap: usize,
    hasher: std::collections::hash_map::RandomState,
}

#[derive(Debug, Default)]
struct MemoShard {
    young: HashMap<(usize, Vec<Gen>), bool>,
    old: HashMap<(usize, Vec<Gen>), bool>,
}

pub const DEFAULT_MEMO_CAP: usize = 1 << 20;

impl Default for IdentityMemo {
    fn default() -> Self {
        IdentityMemo::with_capacity(DEFAULT_MEMO_CAP)
    }
}

impl IdentityMemo {
    pub(crate) fn with_capacity(cap: usize) -> Self {
        IdentityMemo {
            shards: (0..MEMO_SHARDS)
                .map(|_| Mutex::new(MemoShard::default()))
                .collect(),
            shard_cap: (cap / MEMO_SHARDS / 2).max(1),
            hasher: Default::default(),
        }
    }

    fn shard(&self, key: &(usize, Vec<Gen>)) -> &Mutex<MemoShard> {
        &self.shards[self.hasher.hash_one(key) as usize % MEMO_SHARDS]
    }

    fn get(&self, key: &(usize, Vec<Gen>)) -> Option<bool> {
        let mut shard = self.shard(key).lock();
        if let Some(&v) = shard.young.get(key) {
            return Some(v);
        }
        let v = shard.old.remove(key)?;
        shard.young.insert(key.clone(), v);
        Some(v)
    }

    fn insert(&self, key: (usize, Vec<Gen>), value: bool) {
        let cap = self.shard_cap;
        let mut shard = self.shard(&key).lock();
        if shard.young.len() >= cap {
            shard.old = std::mem::take(&mut shard.young);
        }
        shard.young.insert(key, value);
    }

    pub(crate) fn len(&self) -> usize {
        self.shards
            .iter()
            .map(|s| {
                let s = s.lock();
                s.young.len() + s.old.len()
            })
            .sum()
    }
}

fn identity_rec(family: &GroupFamily, stage: usize, word: &[Gen]) -> bool {
    let mut w = Vec::with_capacity(word.len());
    push_reduced(family, stage, &mut w, word);
    identity_reduced(family, stage, w)
}

fn identity_reduced(family: &GroupFamily, stage: usize, w: Vec<Gen>) -> bool {
    match w.len() {
        0 => return true,
        // A single canonical letter is never trivial.
        1 => return false,
        _ => {}
    }
    if swaps_first_level(&w) {
        return false;
    }
    let memoize = w.len() >= MEMO_MIN_LEN;
    let key = (stage, w);
    if memoize {
        if let Some(v) = family.memo().get(&key) {
            return v;
        }
    }
    let [s0, s1] = split(family, stage, &key.1);
    assert!(
        s0.len() < key.1.len() && s1.len() < key.1.len(),
        "contraction must shorten words"
    );
    let next = family.next_stage(stage);
    let result = identity_reduced(family, next, s0) && identity_reduced(family, next, s1);
    if memoize {
        family.memo().insert(key, result);
    }
    result
}

/// Exact identity test by the contraction recursion.
pub fn is_identity(ctx: &GroupContext, word: &[Gen]) -> bool {
    identity_rec(ctx.family(), ctx.stage(), word)
}

/// `w₁ w₂⁻¹ = 1`, with a signature comparison at adaptive depth first.
pub fn equal(ctx: &GroupContext, w1: &[Gen], w2: &[Gen]) -> bool {
    equal_with(ctx, w1, w2, DEFAULT_SIGNATURE_SLACK)
}

pub const DEFAULT_SIGNATURE_SLACK: usize = 5;

/// Adaptive signature depth `⌈log₂ n⌉ + slack` for words of total length `n`.
pub fn adaptive_depth(total_len: usize, slack: usize) -> usize {
    let n = total_len.max(1);
    (usize::BITS - (n - 1).leading_zeros()) as usize + slack
}

pub fn equal_with(ctx: &GroupContext, w1: &[Gen], w2: &[Gen], slack: usize) -> bool {
    let depth = adaptive_depth(w1.len() + w2.len(), slack);
    if signature_at(ctx, w1, depth) != signature_at(ctx, w2, depth) {
        return false;
    }
    let mut q = w1.to_vec();
    q.extend(w2.iter().rev());
    is_identity(ctx, &q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Finite(u64),
    /// No power up to the cap is trivial.
    Unbounded(u64),
}

/// Order of the element `word`, searching exponents up to `cap`. When the
/// oracle is in `Ω₀` the group is a 2-group and only `g, g², g⁴, …` are tested.
pub fn order_of(ctx: &GroupContext, word: &[Gen], cap: u64) -> Order {
    assert!(cap >= 1, "order cap must be at least 1");
    let g = reduce(ctx, word).into_vec();
    if g.is_empty() {
        return Order::Finite(1);
    }
    let family = ctx.family();
    let stage = ctx.stage();
    if crate::groups::classify_oracle(ctx.oracle()).in_omega0 {
        let mut power = g;
        let mut k = 1u64;
        while k <= cap {
            if identity_rec(family, stage, &power) {
                return Order::Finite(k);
            }
            let copy = power.clone();
            push_reduced(family, stage, &mut power, &copy);
            k *= 2;
        }
        return Order::Unbounded(cap);
    }
    let mut power = Vec::new();
    for k in 1..=cap {
        push_reduced(family, stage, &mut power, &g);
        if power.is_empty() || identity_rec(family, stage, &power) {
            return Order::Finite(k);
        }
    }
    Order::Unbounded(cap)
}

/// Portrait of an element to a fixed depth: one bit per vertex of level
/// `< depth` (1 = the section there swaps its first level). Vertices are
/// numbered breadth first, `ε, 0, 1, 00, 01, …`; bit `i` is bit `i % 64` of
/// word `i / 64`. The level-`k` permutation for every `k ≤ depth` is a
/// function of these bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    depth: usize,
    bits: Vec<u64>,
}

impl Signature {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn swaps_at(&self, vertex_index: usize) -> bool {
        self.bits[vertex_index / 64] >> (vertex_index % 64) & 1 == 1
    }

    /// Little-endian packed form, preceded by the depth as one byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbits = (1usize << self.depth) - 1;
        let mut out = vec![self.depth as u8];
        out.extend(
            self.bits
                .iter()
                .flat_map(|w| w.to_le_bytes())
                .take(nbits.div_ceil(8)),
        );
        out
    }

    pub fn is_identity(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Image of the level-`level` vertex with the given index.
    pub fn apply_index(&self, index: usize, level: usize) -> usize {
        assert!(level <= self.depth);
        let mut node = 0usize;
        let mut out = 0usize;
        for i in 0..level {
            let x = (index >> (level - 1 - i)) & 1;
            let y = x ^ self.swaps_at(node) as usize;
            out = (out << 1) | y;
            // Children of breadth-first node n are 2n + 1 and 2n + 2.
            node = 2 * node + 1 + x;
        }
        out
    }
}

pub fn signature_at(ctx: &GroupContext, word: &[Gen], depth: usize) -> Signature {
    assert!((1..=24).contains(&depth), "signature depth out of range");
    let nbits = (1usize << depth) - 1;
    let mut bits = vec![0u64; nbits.div_ceil(64)];
    let family = ctx.family();
    let root = reduce(ctx, word).into_vec();
    let mut level = vec![(0usize, root)];
    let mut stage = ctx.stage();
    for _ in 0..depth {
        let mut next_level = Vec::with_capacity(level.len() * 2);
        for (node, w) in level {
            if w.is_empty() {
                continue;
            }
            if swaps_first_level(&w) {
                bits[node / 64] |= 1 << (node % 64);
            }
            let [s0, s1] = split(family, stage, &w);
            next_level.push((2 * node + 1, s0));
            next_level.push((2 * node + 2, s1));
        }
        level = next_level;
        stage = family.next_stage(stage);
    }
    Signature { depth, bits }
}

/// Exact canonical encoding of a group element.
///
/// Every element of `𝒢_ω` at a stage is either in the nucleus
/// `{1, a, b, c, d}` of that stage, encoded as one byte `0..=4`, or is
/// encoded as `5 + swap` followed by the encodings of its two sections over
/// the next stage. Since sections of a word of length `n ≥ 2` are shorter,
/// the tree is finite; since a non-nucleus element is recognised by comparing
/// its one-level expansion with the nucleus expansions, equal elements get
/// equal keys.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementKey(pub Box<[u8]>);

impl ElementKey {
    pub fn is_identity(&self) -> bool {
        self.0.as_ref() == [0]
    }

    pub fn fingerprint(&self) -> u128 {
        xxhash_rust::xxh3::xxh3_128(&self.0)
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:x}")).collect()
    }
}

const NODE: u8 = 5;

#[inline]
fn leaf_code(g: Option<Gen>) -> u8 {
    g.map_or(0, |g| g as u8 + 1)
}

fn encode(family: &GroupFamily, stage: usize, w: &[Gen], out: &mut Vec<u8>) {
    match w.len() {
        0 => return out.push(0),
        1 => return out.push(leaf_code(Some(w[0]))),
        _ => {}
    }
    let swap = swaps_first_level(w);
    let start = out.len();
    out.push(NODE + swap as u8);
    let next = family.next_stage(stage);
    let [s0, s1] = split(family, stage, w);
    encode(family, next, &s0, out);
    encode(family, next, &s1, out);
    if out.len() != start + 3 {
        return;
    }
    let (c0, c1) = (out[start + 1], out[start + 2]);
    let collapsed = if c0 == 0 && c1 == 0 {
        Some(if swap { leaf_code(Some(Gen::A)) } else { 0 })
    } else if swap {
        None
    } else {
        crate::groups::SPINE.into_iter().find_map(|g| {
            let g = family.canonical_letter(stage, g)?;
            let expansion = (
                leaf_code(family.zero_section(stage, g)),
                leaf_code(family.canonical_letter(next, g)),
            );
            (expansion == (c0, c1)).then(|| leaf_code(Some(g)))
        })
    };
    if let Some(code) = collapsed {
        out.truncate(start);
        out.push(code);
    }
}

pub fn element_key(ctx: &GroupContext, word: &[Gen]) -> ElementKey {
    let mut out = Vec::new();
    element_key_into(ctx.family(), ctx.stage(), word, &mut out);
    ElementKey(out.into_boxed_slice())
}

pub(crate) fn element_key_into(
    family: &GroupFamily,
    stage: usize,
    word: &[Gen],
    out: &mut Vec<u8>,
) {
    let mut w = Vec::with_capacity(word.len());
    push_reduced(family, stage, &mut w, word);
    encode(family, stage, &w, out);
}
