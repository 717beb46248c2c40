#![allow(dead_code)]

use selfsim_core::groups::{build_group, Gen, GroupContext, OracleSequence, GENERATORS};
use selfsim_core::tree::{BoundaryPoint, Perm};
use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

pub fn xi() -> &'static GroupContext {
    static CTX: OnceLock<GroupContext> = OnceLock::new();
    CTX.get_or_init(|| build_group(&OracleSequence::xi(), 0))
}

pub fn ctx(text: &str) -> GroupContext {
    build_group(&OracleSequence::parse(text).unwrap(), 0)
}

pub fn word(text: &str) -> Vec<Gen> {
    selfsim_core::groups::parse_word(text).unwrap()
}

/// All words of length exactly `n` over `{a, b, c, d}`, in lexicographic order.
pub fn all_words(n: usize) -> impl Iterator<Item = Vec<Gen>> {
    (0..4usize.pow(n as u32)).map(move |mut i| {
        let mut w = vec![Gen::A; n];
        for slot in w.iter_mut().rev() {
            *slot = GENERATORS[i % 4];
            i /= 4;
        }
        w
    })
}

/// Ball sizes by breadth-first search over words, identifying elements by
/// their action on the first `depth` levels. Returns per-radius portrait sets.
pub fn naive_ball(ctx: &GroupContext, radius: usize, depth: usize) -> Vec<BTreeSet<Vec<Perm>>> {
    let mut seen: HashMap<Vec<Perm>, Vec<Gen>> = HashMap::new();
    let id = ctx.identity().portrait(depth);
    seen.insert(id.clone(), Vec::new());
    let mut layers = vec![BTreeSet::from([id])];
    let mut frontier = vec![Vec::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        let mut layer = BTreeSet::new();
        for w in &frontier {
            for g in GENERATORS {
                let mut v: Vec<Gen> = w.clone();
                v.push(g);
                let p = ctx.word_to_automorphism(&v).portrait(depth);
                if !seen.contains_key(&p) {
                    seen.insert(p.clone(), v.clone());
                    layer.insert(p);
                    next.push(v);
                }
            }
        }
        layers.push(layer);
        frontier = next;
    }
    layers
}

/// `x·w` for the right action: letters are applied left to right.
pub fn act_right(ctx: &GroupContext, x: &BoundaryPoint, w: &[Gen]) -> BoundaryPoint {
    w.iter().fold(x.clone(), |p, &g| {
        ctx.generator(g).apply_boundary(&p, 256).unwrap()
    })
}

/// Δ(n) by enumerating every word of length `n`; ties go to the
/// lexicographically least word.
pub fn brute_force_delta(ctx: &GroupContext, x: &BoundaryPoint, n: usize) -> (usize, Vec<Gen>) {
    let mut image: HashMap<(BoundaryPoint, Gen), BoundaryPoint> = HashMap::new();
    let mut step = |p: &BoundaryPoint, g: Gen| -> BoundaryPoint {
        image
            .entry((p.clone(), g))
            .or_insert_with(|| ctx.generator(g).apply_boundary(p, 256).unwrap())
            .clone()
    };
    let mut best = (0, Vec::new());
    for w in all_words(n) {
        let mut points = BTreeSet::from([x.to_string()]);
        for i in 0..n {
            let mut p = x.clone();
            for &g in &w[i..] {
                p = step(&p, g);
            }
            points.insert(p.to_string());
        }
        if points.len() > best.0 {
            best = (points.len(), w);
        }
    }
    best
}
